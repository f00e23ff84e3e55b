#include "glyphgan/train.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "glyphgan/errors.hpp"

namespace glyphgan {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (lr_initial <= 0) throw ConfigError("lr_initial must be > 0");
  if (lr_decay <= 0) throw ConfigError("lr_decay must be > 0");
  if (lr_decay > 1) throw ConfigError("lr_decay must be <= 1 (schedule must be non-increasing)");
  if (lr_constant_epochs < 0) throw ConfigError("lr_constant_epochs must be >= 0");
  if (g_steps_per_d_step < 1) throw ConfigError("g_steps_per_d_step must be >= 1");
  if (weights.lambda_p < 0 || weights.lambda_c < 0 || weights.lambda_s < 0)
    throw ConfigError("loss weights must be >= 0");
  if (net.styles < 1) throw ConfigError("styles must be >= 1");
}

TrainConfig parse_train_config_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::istringstream row(line);
    std::string key, eq, value;
    if (!(row >> key)) continue;
    if (!(row >> eq >> value) || eq != "=")
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected `key = value`");
    apply_overrides(cfg, {{key, value}});
  }
  return cfg;
}

TrainConfig parse_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config_text(buf.str());
}

void apply_overrides(TrainConfig& cfg,
                     const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    try {
      if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "lr_initial") cfg.lr_initial = std::stod(value);
      else if (key == "lr_decay") cfg.lr_decay = std::stod(value);
      else if (key == "lr_constant_epochs") cfg.lr_constant_epochs = std::stoi(value);
      else if (key == "decay_mode") {
        if (value == "per_epoch") cfg.decay_mode = DecayMode::kPerEpoch;
        else if (value == "single") cfg.decay_mode = DecayMode::kSingle;
        else throw ConfigError("decay_mode must be per_epoch or single");
      } else if (key == "beta1") cfg.beta1 = std::stod(value);
      else if (key == "beta2") cfg.beta2 = std::stod(value);
      else if (key == "g_steps_per_d_step") cfg.g_steps_per_d_step = std::stoi(value);
      else if (key == "lambda_p") cfg.weights.lambda_p = std::stod(value);
      else if (key == "lambda_c") cfg.weights.lambda_c = std::stod(value);
      else if (key == "lambda_s") cfg.weights.lambda_s = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "styles") cfg.net.styles = std::stoi(value);
      else if (key == "style_mode")
        cfg.net.style_mode = style_mode_from_string(value);
      else if (key == "style_embed_width") cfg.net.style_embed_width = std::stoi(value);
      else if (key == "components_enabled")
        cfg.net.components_enabled = value != "0" && value != "false";
      else if (key == "component_vocab") cfg.net.component_vocab = std::stoi(value);
      else if (key == "component_embed_width")
        cfg.net.component_embed_width = std::stoi(value);
      else if (key == "dropout_on_output")
        cfg.net.dropout_on_output = value != "0" && value != "false";
      else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("bad value for " + key + ": " + value);
    }
  }
}

std::string train_config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "batch_size = " << cfg.batch_size << "\n"
      << "epochs = " << cfg.epochs << "\n"
      << "lr_initial = " << cfg.lr_initial << "\n"
      << "lr_decay = " << cfg.lr_decay << "\n"
      << "lr_constant_epochs = " << cfg.lr_constant_epochs << "\n"
      << "decay_mode = "
      << (cfg.decay_mode == DecayMode::kPerEpoch ? "per_epoch" : "single") << "\n"
      << "beta1 = " << cfg.beta1 << "\n"
      << "beta2 = " << cfg.beta2 << "\n"
      << "g_steps_per_d_step = " << cfg.g_steps_per_d_step << "\n"
      << "lambda_p = " << cfg.weights.lambda_p << "\n"
      << "lambda_c = " << cfg.weights.lambda_c << "\n"
      << "lambda_s = " << cfg.weights.lambda_s << "\n"
      << "seed = " << cfg.seed << "\n"
      << "styles = " << cfg.net.styles << "\n"
      << "style_mode = " << to_string(cfg.net.style_mode) << "\n"
      << "style_embed_width = " << cfg.net.style_embed_width << "\n"
      << "components_enabled = " << (cfg.net.components_enabled ? 1 : 0) << "\n"
      << "component_vocab = " << cfg.net.component_vocab << "\n"
      << "component_embed_width = " << cfg.net.component_embed_width << "\n"
      << "dropout_on_output = " << (cfg.net.dropout_on_output ? 1 : 0) << "\n";
  return out.str();
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 1 || epoch > cfg.epochs)
    throw RangeError("epoch " + std::to_string(epoch) + " outside [1, " +
                     std::to_string(cfg.epochs) + "]");
  if (epoch <= cfg.lr_constant_epochs) return cfg.lr_initial;
  if (cfg.decay_mode == DecayMode::kSingle) return cfg.lr_initial * cfg.lr_decay;
  return cfg.lr_initial *
         std::pow(cfg.lr_decay, epoch - cfg.lr_constant_epochs);
}

Batch make_batch(const SampleSet& set, const std::vector<std::size_t>& indices) {
  Batch b;
  std::vector<torch::Tensor> xs, ys;
  for (std::size_t i : indices) {
    auto s = set.load(i);
    xs.push_back(s.source);
    ys.push_back(s.target);
    b.styles.push_back(s.style);
    b.components.push_back(s.components);
  }
  b.x = torch::stack(xs);
  b.y = torch::stack(ys);
  return b;
}

Trainer::Trainer(TrainConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  torch::manual_seed(cfg_.seed);
  generator_ = Generator(cfg_.net);
  discriminator_ = Discriminator(cfg_.net.styles);
  init_weights(*generator_);
  init_weights(*discriminator_);
  auto opts = torch::optim::AdamOptions(cfg_.lr_initial)
                  .betas({cfg_.beta1, cfg_.beta2});
  opt_g_ = std::make_unique<torch::optim::Adam>(generator_->parameters(), opts);
  opt_d_ = std::make_unique<torch::optim::Adam>(discriminator_->parameters(), opts);
  generator_->train();
  discriminator_->train();
}

Trainer::Trainer(TrainConfig cfg, const Checkpoint& resume) : Trainer(cfg) {
  require_net_config(resume, cfg_.net);
  unpack_module(resume, "generator", *generator_);
  unpack_module(resume, "discriminator", *discriminator_);
  unpack_optimizer(resume, "optim/generator", *opt_g_);
  unpack_optimizer(resume, "optim/discriminator", *opt_d_);
  unpack_torch_rng(resume);
  step_ = std::stol(resume.meta.at("step"));
  epoch_ = std::stoi(resume.meta.at("epoch"));
  batch_in_epoch_ = std::stol(resume.meta.at("batch_in_epoch"));
  if (auto it = resume.meta.find("best_val_ssim"); it != resume.meta.end())
    best_val_ssim_ = std::stod(it->second);
}

void Trainer::set_lr(double lr) {
  for (auto* opt : {opt_g_.get(), opt_d_.get()})
    for (auto& group : opt->param_groups())
      static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
}

LossReport Trainer::train_step(const Batch& batch) {
  check_glyph_batch(batch.x);
  check_glyph_batch(batch.y);
  const bool styled = cfg_.net.style_mode != StyleMode::kDisabled;
  LossReport report;

  // Discriminator update; the fake pair carries no generator gradients.
  {
    auto fake = generator_->forward(batch.x, batch.styles, batch.components)
                    .detach();
    auto out_real = discriminator_->forward(batch.x, batch.y);
    auto out_fake = discriminator_->forward(batch.x, fake);
    auto adv = adversarial_terms(out_real.realness, out_fake.realness);
    auto d_total = adv.d_loss;
    double cat_real = 0;
    if (styled) {
      auto cat = category_term(out_real.style_logits, batch.styles,
                               cfg_.net.styles);
      cat_real = cat.item<double>();
      d_total = d_total + cfg_.weights.lambda_s * cat;
    }
    report.adv_d = adv.d_loss.item<double>();
    report.total_d = d_total.item<double>();
    report.category = cat_real;
    if (!std::isfinite(report.total_d))
      throw DivergenceError(step_, "discriminator loss is not finite (adv " +
                                       std::to_string(report.adv_d) + ")");
    opt_d_->zero_grad();
    d_total.backward();
    opt_d_->step();
    ++d_updates;
  }

  // Generator updates, same batch each time.
  double cat_real_part = report.category;
  for (int k = 0; k < cfg_.g_steps_per_d_step; ++k) {
    auto fake = generator_->forward(batch.x, batch.styles, batch.components);
    auto out_fake = discriminator_->forward(batch.x, fake);
    namespace F = torch::nn::functional;
    auto adv_g = F::binary_cross_entropy_with_logits(
        out_fake.realness, torch::ones_like(out_fake.realness),
        F::BinaryCrossEntropyWithLogitsFuncOptions());
    auto pixel = pixel_loss(batch.y, fake);
    auto constancy = constancy_loss(batch.x, fake, generator_->encoder);
    auto g_total = adv_g + cfg_.weights.lambda_p * pixel +
                   cfg_.weights.lambda_c * constancy;
    double cat_fake = 0;
    if (styled) {
      auto cat = category_term(out_fake.style_logits, batch.styles,
                               cfg_.net.styles);
      cat_fake = cat.item<double>();
      g_total = g_total + cfg_.weights.lambda_s * cat;
    }
    report.adv_g = adv_g.item<double>();
    report.pixel = pixel.item<double>();
    report.constancy = constancy.item<double>();
    report.category = cat_real_part + cat_fake;
    report.total_g = g_total.item<double>();
    if (!std::isfinite(report.total_g))
      throw DivergenceError(
          step_, "generator loss is not finite (adv " +
                     std::to_string(report.adv_g) + ", pixel " +
                     std::to_string(report.pixel) + ", constancy " +
                     std::to_string(report.constancy) + ")");
    opt_g_->zero_grad();
    g_total.backward();
    opt_g_->step();
    ++g_updates;
  }

  ++step_;
  return report;
}

Checkpoint Trainer::snapshot() const {
  Checkpoint ckpt;
  put_net_config(ckpt, cfg_.net);
  ckpt.meta["train_config"] = train_config_to_text(cfg_);
  ckpt.meta["step"] = std::to_string(step_);
  ckpt.meta["epoch"] = std::to_string(epoch_);
  ckpt.meta["batch_in_epoch"] = std::to_string(batch_in_epoch_);
  ckpt.meta["best_val_ssim"] = std::to_string(best_val_ssim_);
  pack_module(ckpt, "generator", *generator_);
  pack_module(ckpt, "discriminator", *discriminator_);
  pack_optimizer(ckpt, "optim/generator", *opt_g_);
  pack_optimizer(ckpt, "optim/discriminator", *opt_d_);
  pack_torch_rng(ckpt);
  return ckpt;
}

std::string metrics_line(long step, int epoch, const LossReport& r, double lr) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << step << ' ' << epoch << ' ' << r.total_d << ' ' << r.adv_g << ' '
      << r.pixel << ' ' << r.constancy << ' ' << r.category << ' ' << lr;
  return out.str();
}

void Trainer::train(const SampleSet& train_set, std::ostream* metrics,
                    const Sink* sink, const SampleSet* validation) {
  if (train_set.size() == 0) throw ConfigError("training set is empty");
  generator_->train();
  discriminator_->train();

  const auto n = train_set.size();
  for (; epoch_ <= cfg_.epochs; ++epoch_, batch_in_epoch_ = 0) {
    const double lr = lr_at(epoch_, cfg_);
    set_lr(lr);
    auto order = shuffled_indices(n, cfg_.seed, epoch_);
    const long batches =
        static_cast<long>((n + cfg_.batch_size - 1) / cfg_.batch_size);
    for (; batch_in_epoch_ < batches; ++batch_in_epoch_) {
      const auto begin = static_cast<std::size_t>(batch_in_epoch_) *
                         cfg_.batch_size;
      const auto end = std::min(n, begin + cfg_.batch_size);
      std::vector<std::size_t> ids(order.begin() + begin, order.begin() + end);
      auto report = train_step(make_batch(train_set, ids));
      if (metrics) *metrics << metrics_line(step_, epoch_, report, lr) << "\n";
    }
    if (metrics) metrics->flush();
    if (sink) {
      if (validation && validation->size() > 0) {
        auto val = evaluate(generator_, *validation);
        if (val.overall.ssim > best_val_ssim_) {
          best_val_ssim_ = val.overall.ssim;
          sink->write(snapshot(), "best");
        }
      }
      sink->write(snapshot(), "epoch_" + std::to_string(epoch_));
    }
  }
}

std::vector<AblationRow> run_ablation(
    const std::vector<std::pair<std::string, NetConfig>>& matrix,
    const TrainConfig& base, const SampleSet& train_set,
    const SampleSet& test_set) {
  std::vector<AblationRow> rows;
  for (const auto& [name, net] : matrix) {
    TrainConfig cfg = base;
    cfg.net = net;
    Trainer trainer(cfg);
    trainer.train(train_set, nullptr);
    auto report = evaluate(trainer.generator(), test_set);
    rows.push_back({name, report.overall});
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(24) << "Method" << std::right << std::setw(10)
      << "MSE" << std::setw(10) << "SSIM" << "\n";
  for (const auto& row : rows)
    out << std::left << std::setw(24) << row.name << std::right << std::setw(10)
        << row.metrics.mse << std::setw(10) << row.metrics.ssim << "\n";
  return out.str();
}

}  // namespace glyphgan
