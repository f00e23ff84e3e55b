#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/testing.hpp"

#include <map>
#include <sstream>
#include <vector>

#include "glyphgan/errors.hpp"
#include "glyphgan/train.hpp"
#include "support/fixtures.hpp"

using namespace glyphgan;
using glyphgan::testing::TempDir;

namespace {

TrainConfig toy_config() {
  TrainConfig cfg;
  cfg.net.styles = 3;
  cfg.net.component_vocab = 50;
  cfg.batch_size = 4;
  cfg.epochs = 2;
  cfg.seed = 7;
  return cfg;
}

struct ToyData {
  TempDir dir{"train"};
  std::vector<CharacterCode> chars;
  std::unique_ptr<Corpus> corpus;
  std::unique_ptr<ComponentDictionary> dict;
  std::unique_ptr<SampleSet> set;

  explicit ToyData(int n_chars = 4, int styles = 3) {
    chars = testing::toy_characters(n_chars);
    testing::write_toy_corpus(dir.path(), styles, chars);
    corpus = std::make_unique<Corpus>(dir.path());
    dict = std::make_unique<ComponentDictionary>(
        testing::make_toy_dictionary(chars, 50));
    DatasetSplit split;
    split.train_chars = {chars.begin(), chars.end()};
    set = std::make_unique<SampleSet>(
        build_samples(split, *corpus, *dict, true));
  }
};

}  // namespace

TEST_CASE("learning rate holds for twenty epochs, then decays") {
  TrainConfig cfg;  // 0.001, constant 20, halving, 40 epochs

  SUBCASE("per-epoch halving") {
    CHECK(lr_at(1, cfg) == 0.001);
    CHECK(lr_at(20, cfg) == 0.001);
    CHECK(lr_at(21, cfg) == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(lr_at(22, cfg) == doctest::Approx(0.00025).epsilon(1e-12));
    CHECK(lr_at(40, cfg) ==
          doctest::Approx(0.001 * std::pow(0.5, 20)).epsilon(1e-12));
  }
  SUBCASE("single halving") {
    cfg.decay_mode = DecayMode::kSingle;
    CHECK(lr_at(20, cfg) == 0.001);
    CHECK(lr_at(21, cfg) == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(lr_at(40, cfg) == doctest::Approx(0.0005).epsilon(1e-12));
  }
  SUBCASE("epochs outside the schedule are rejected") {
    CHECK_THROWS_AS(lr_at(0, cfg), RangeError);
    CHECK_THROWS_AS(lr_at(41, cfg), RangeError);
  }
  SUBCASE("schedule is non-increasing") {
    for (int e = 2; e <= cfg.epochs; ++e)
      CHECK(lr_at(e, cfg) <= lr_at(e - 1, cfg));
  }
}

TEST_CASE("config text serialization round-trips every field") {
  TrainConfig cfg = toy_config();
  cfg.decay_mode = DecayMode::kSingle;
  cfg.net.style_mode = StyleMode::kEmbedding;
  cfg.weights.lambda_p = 50;
  auto text = train_config_to_text(cfg);
  auto back = parse_train_config_text(text);
  CHECK(train_config_to_text(back) == text);
  CHECK(back.net == cfg.net);
  CHECK(back.seed == cfg.seed);
  CHECK(back.decay_mode == DecayMode::kSingle);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_train_config_text("warp_speed = 9"), ConfigError);
  CHECK_THROWS_AS(parse_train_config_text("batch_size = many"), ConfigError);
  CHECK_THROWS_AS(parse_train_config_text("batch_size 16"), ConfigError);
  auto cfg = parse_train_config_text("# comment only\n\nepochs = 5 # tail\n");
  CHECK(cfg.epochs == 5);

  TrainConfig base;
  apply_overrides(base, {{"lambda_c", "7.5"}, {"style_mode", "disabled"}});
  CHECK(base.weights.lambda_c == 7.5);
  CHECK(base.net.style_mode == StyleMode::kDisabled);
  CHECK_THROWS_AS(apply_overrides(base, {{"decay_mode", "sometimes"}}),
                  ConfigError);
}

TEST_CASE("invalid configurations fail validation") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig();
  cfg.lr_decay = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig();
  cfg.weights.lambda_p = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig();
  cfg.g_steps_per_d_step = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("batches assemble samples in the requested order") {
  ToyData data;
  auto batch = make_batch(*data.set, {2, 0});
  CHECK(batch.x.sizes() == torch::IntArrayRef({2, 1, 256, 256}));
  CHECK(batch.y.sizes() == torch::IntArrayRef({2, 1, 256, 256}));
  REQUIRE(batch.styles.size() == 2);
  const auto& specs = data.set->specs();
  CHECK(batch.styles[0] == specs[2].style);
  CHECK(batch.styles[1] == specs[0].style);
  CHECK(batch.components[0] == data.dict->decompose(specs[2].character));
}

TEST_CASE("one step runs one discriminator and two generator updates") {
  ToyData data;
  auto cfg = toy_config();
  Trainer trainer(cfg);
  auto batch = make_batch(*data.set, {0, 1, 2, 3});
  auto r = trainer.train_step(batch);
  trainer.train_step(batch);
  CHECK(trainer.d_updates == 2);
  CHECK(trainer.g_updates == 4);
  CHECK(trainer.step() == 2);
  CHECK(std::isfinite(r.total_g));
  CHECK(std::isfinite(r.total_d));
  CHECK(r.pixel >= 0.0);
  CHECK(r.constancy >= 0.0);

  cfg.g_steps_per_d_step = 1;
  cfg.seed = 8;
  Trainer single(cfg);
  single.train_step(batch);
  CHECK(single.d_updates == 1);
  CHECK(single.g_updates == 1);
}

TEST_CASE("a zero learning rate leaves every parameter untouched") {
  ToyData data;
  Trainer trainer(toy_config());
  trainer.set_lr(0.0);
  std::map<std::string, torch::Tensor> before;
  for (const auto& kv : trainer.generator()->named_parameters())
    before["g/" + kv.key()] = kv.value().clone();
  for (const auto& kv : trainer.discriminator()->named_parameters())
    before["d/" + kv.key()] = kv.value().clone();

  trainer.train_step(make_batch(*data.set, {0, 1}));

  for (const auto& kv : trainer.generator()->named_parameters())
    CHECK(torch::equal(kv.value(), before["g/" + kv.key()]));
  for (const auto& kv : trainer.discriminator()->named_parameters())
    CHECK(torch::equal(kv.value(), before["d/" + kv.key()]));
}

TEST_CASE("identical seeds reproduce identical loss trajectories") {
  ToyData data;
  auto run = [&](uint64_t seed) {
    auto cfg = toy_config();
    cfg.seed = seed;
    Trainer trainer(cfg);
    std::vector<std::string> lines;
    for (int s = 0; s < 2; ++s) {
      auto r = trainer.train_step(make_batch(*data.set, {0, 1, 2, 3}));
      lines.push_back(metrics_line(trainer.step(), 1, r, 0.001));
    }
    return lines;
  };
  auto a = run(7);
  auto b = run(7);
  auto c = run(8);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("a resumed trainer replays the uninterrupted run exactly") {
  ToyData data;
  auto cfg = toy_config();
  auto b1 = make_batch(*data.set, {0, 1, 2, 3});
  auto b2 = make_batch(*data.set, {4, 5, 6, 7});
  auto b3 = make_batch(*data.set, {8, 9, 10, 11});

  // Only one trainer lives at a time: a trainer plus its step's autograd
  // state is several GB, and this box cannot hold two at once.
  std::string want_line;
  std::map<std::string, torch::Tensor> want_g, want_d;
  {
    Trainer uninterrupted(cfg);
    uninterrupted.train_step(b1);
    uninterrupted.train_step(b2);
    auto want = uninterrupted.train_step(b3);
    want_line = metrics_line(3, 1, want, 0.001);
    for (const auto& kv : uninterrupted.generator()->named_parameters())
      want_g[kv.key()] = kv.value().detach().clone();
    for (const auto& kv : uninterrupted.discriminator()->named_parameters())
      want_d[kv.key()] = kv.value().detach().clone();
  }

  // round-trip through the on-disk format, then take the third step
  TempDir dir("resume");
  {
    Trainer first_half(cfg);
    first_half.train_step(b1);
    first_half.train_step(b2);
    save_checkpoint(first_half.snapshot(), dir.path() / "mid.ckpt");
  }
  Trainer resumed(cfg, load_checkpoint(dir.path() / "mid.ckpt"));
  CHECK(resumed.step() == 2);
  auto got = resumed.train_step(b3);

  CHECK(metrics_line(3, 1, got, 0.001) == want_line);
  for (const auto& kv : resumed.generator()->named_parameters())
    CHECK(torch::equal(kv.value(), want_g.at(kv.key())));
  for (const auto& kv : resumed.discriminator()->named_parameters())
    CHECK(torch::equal(kv.value(), want_d.at(kv.key())));
}

TEST_CASE("resume refuses a checkpoint from a different architecture") {
  auto cfg = toy_config();
  Trainer trainer(cfg);
  auto ckpt = trainer.snapshot();
  auto other = cfg;
  other.net.components_enabled = false;
  CHECK_THROWS_AS(Trainer(other, ckpt), ConfigError);
}

TEST_CASE("full runs log every step and checkpoint every epoch") {
  ToyData data;  // 12 samples, batch 4 -> 3 steps/epoch, 2 epochs
  auto cfg = toy_config();

  // Checkpoints carry full parameter + optimizer state (about a gigabyte
  // each), so keep only the one the resume subcase actually needs.
  auto run_full = [&](Checkpoint* keep_epoch_1) {
    Trainer trainer(cfg);
    std::ostringstream log;
    std::vector<std::string> tags;
    Trainer::Sink sink{[&](const Checkpoint& c, const std::string& tag) {
      tags.push_back(tag);
      if (keep_epoch_1 && tag == "epoch_1") *keep_epoch_1 = c;
    }};
    trainer.train(*data.set, &log, &sink, data.set.get());
    return std::pair(log.str(), tags);
  };

  Checkpoint epoch_1;
  auto [log_a, tags_a] = run_full(&epoch_1);
  auto [log_b, tags_b] = run_full(nullptr);
  CHECK(log_a == log_b);  // bit-identical metrics logs

  std::istringstream lines(log_a);
  std::string line;
  std::vector<std::pair<long, int>> seen;
  while (std::getline(lines, line)) {
    std::istringstream row(line);
    long step;
    int epoch;
    row >> step >> epoch;
    seen.emplace_back(step, epoch);
  }
  const std::vector<std::pair<long, int>> want = {
      {1, 1}, {2, 1}, {3, 1}, {4, 2}, {5, 2}, {6, 2}};
  CHECK(seen == want);

  // best-by-validation checkpoint precedes each epoch tag when it improves
  REQUIRE(tags_a.size() >= 3);
  CHECK(tags_a[0] == "best");
  CHECK(std::count(tags_a.begin(), tags_a.end(), "epoch_1") == 1);
  CHECK(std::count(tags_a.begin(), tags_a.end(), "epoch_2") == 1);

  SUBCASE("training continues from the epoch checkpoint seamlessly") {
    Trainer resumed(cfg, epoch_1);
    std::ostringstream tail;
    resumed.train(*data.set, &tail);
    // the resumed log must equal the last three lines of the full log
    std::string want_tail;
    std::istringstream all(log_a);
    int i = 0;
    while (std::getline(all, line))
      if (++i > 3) want_tail += line + "\n";
    CHECK(tail.str() == want_tail);
  }
}

TEST_CASE("non-finite inputs surface as a divergence error with the step") {
  ToyData data;
  Trainer trainer(toy_config());
  auto batch = make_batch(*data.set, {0, 1});
  batch.x[0][0][3][3] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(trainer.train_step(batch), DivergenceError);
  try {
    trainer.train_step(batch);
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("training an empty set is a configuration error") {
  SampleSet empty({}, nullptr, nullptr);
  Trainer trainer(toy_config());
  CHECK_THROWS_AS(trainer.train(empty, nullptr), ConfigError);
}

TEST_CASE("the ablation harness is deterministic across reruns") {
  ToyData data(2, 2);  // 4 samples: one batch per epoch
  auto cfg = toy_config();
  cfg.net.styles = 2;
  cfg.epochs = 1;

  NetConfig full = cfg.net;
  NetConfig no_components = full;
  no_components.components_enabled = false;
  const std::vector<std::pair<std::string, NetConfig>> matrix = {
      {"full", full}, {"no_components", no_components}};

  DatasetSplit split;
  split.train_chars = {data.chars.begin(), data.chars.end()};
  auto test_set = build_samples(split, *data.corpus, *data.dict, true);

  auto rows1 = run_ablation(matrix, cfg, *data.set, test_set);
  auto rows2 = run_ablation(matrix, cfg, *data.set, test_set);
  REQUIRE(rows1.size() == 2);
  CHECK(rows1[0].name == "full");
  CHECK(rows1[1].name == "no_components");
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].metrics.mse == rows2[i].metrics.mse);
    CHECK(rows1[i].metrics.ssim == rows2[i].metrics.ssim);
  }
  auto table = format_ablation(rows1);
  CHECK(table.find("no_components") != std::string::npos);
  CHECK(format_ablation(rows2) == table);
}
