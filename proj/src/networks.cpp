#include "glyphgan/networks.hpp"

#include "glyphgan/errors.hpp"

namespace glyphgan {

namespace {

constexpr int kEncoderChannels[9] = {1, 64, 128, 256, 512, 512, 512, 512, 512};
constexpr int kDecoderChannels[9] = {0, 512, 512, 512, 512, 256, 128, 64, 1};

torch::nn::Sequential conv_block(int in, int out, int stride, double slope) {
  using namespace torch::nn;
  return Sequential(
      Conv2d(Conv2dOptions(in, out, 5).stride(stride).padding(2).bias(false)),
      BatchNorm2d(out), LeakyReLU(LeakyReLUOptions().negative_slope(slope)));
}

}  // namespace

StyleMode style_mode_from_string(const std::string& s) {
  if (s == "onehot") return StyleMode::kOneHot;
  if (s == "embedding") return StyleMode::kEmbedding;
  if (s == "disabled") return StyleMode::kDisabled;
  throw ConfigError("unknown style mode: " + s);
}

std::string to_string(StyleMode mode) {
  switch (mode) {
    case StyleMode::kOneHot: return "onehot";
    case StyleMode::kEmbedding: return "embedding";
    case StyleMode::kDisabled: return "disabled";
  }
  return "?";
}

int NetConfig::style_width() const {
  switch (style_mode) {
    case StyleMode::kOneHot: return styles;
    case StyleMode::kEmbedding: return style_embed_width;
    case StyleMode::kDisabled: return 0;
  }
  return 0;
}

int NetConfig::condition_length() const {
  return kImageFeatureWidth + style_width() +
         (components_enabled ? component_feature_width : 0);
}

torch::Tensor one_hot_style(StyleLabel s, int styles) {
  if (s < 1 || s > styles)
    throw RangeError("style label " + std::to_string(s) + " outside [1, " +
                     std::to_string(styles) + "]");
  auto v = torch::zeros({styles});
  v[s - 1] = 1.0f;
  return v;
}

void check_glyph_batch(const torch::Tensor& t) {
  if (t.dim() != 4 || t.size(1) != 1 || t.size(2) != kGlyphSize ||
      t.size(3) != kGlyphSize)
    throw ShapeError("expected glyph batch of shape {B,1,256,256}, got " +
                     std::to_string(t.dim()) + "-d tensor");
}

ImageEncoderImpl::ImageEncoderImpl() {
  for (int i = 1; i <= 8; ++i) {
    blocks.push_back(
        conv_block(kEncoderChannels[i - 1], kEncoderChannels[i], 2, 0.2));
    register_module("L" + std::to_string(i), blocks.back());
  }
}

EncoderOutput ImageEncoderImpl::forward(const torch::Tensor& x) {
  check_glyph_batch(x);
  EncoderOutput out;
  torch::Tensor h = x;
  for (int i = 0; i < 8; ++i) {
    h = blocks[i]->forward(h);
    if (i < 7) out.skips.push_back(h);
  }
  out.feature = h.flatten(1);  // {B, 512}
  return out;
}

ComponentEncoderImpl::ComponentEncoderImpl(const NetConfig& cfg)
    : vocab(cfg.component_vocab) {
  // Index 0 is padding; component IDs are 1-based.
  embedding = register_module(
      "embedding", torch::nn::Embedding(torch::nn::EmbeddingOptions(
                                            vocab + 1, cfg.component_embed_width)
                                            .padding_idx(0)));
  lstm = register_module(
      "lstm", torch::nn::LSTM(torch::nn::LSTMOptions(cfg.component_embed_width,
                                                     cfg.component_feature_width)
                                  .batch_first(true)));
}

torch::Tensor ComponentEncoderImpl::forward(
    const std::vector<ComponentSequence>& batch) {
  if (batch.empty()) throw ShapeError("component batch is empty");
  int64_t max_len = 0;
  for (const auto& seq : batch) {
    if (seq.empty())
      throw ShapeError("empty component sequence");
    for (ComponentId id : seq)
      if (id < 1 || id > vocab)
        throw RangeError("component ID " + std::to_string(id) +
                         " outside [1, " + std::to_string(vocab) + "]");
    max_len = std::max<int64_t>(max_len, static_cast<int64_t>(seq.size()));
  }
  const auto B = static_cast<int64_t>(batch.size());
  auto ids = torch::zeros({B, max_len}, torch::kInt64);
  auto last = torch::zeros({B}, torch::kInt64);
  for (int64_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < batch[b].size(); ++t)
      ids[b][static_cast<int64_t>(t)] = batch[b][t];
    last[b] = static_cast<int64_t>(batch[b].size()) - 1;
  }
  auto emb = embedding->forward(ids);               // {B, T, 128}
  auto [output, state] = lstm->forward(emb);        // {B, T, 256}
  // Hidden state at each sequence's final step.
  auto idx = last.view({B, 1, 1}).expand({B, 1, output.size(2)});
  return output.gather(1, idx).squeeze(1);          // {B, 256}
}

StyleEncoderImpl::StyleEncoderImpl(const NetConfig& cfg)
    : mode(cfg.style_mode), styles(cfg.styles) {
  if (mode == StyleMode::kEmbedding)
    table = register_module(
        "table", torch::nn::Embedding(styles + 1, cfg.style_embed_width));
}

torch::Tensor StyleEncoderImpl::forward(const std::vector<StyleLabel>& labels) {
  if (mode == StyleMode::kDisabled) return torch::Tensor();
  const auto B = static_cast<int64_t>(labels.size());
  auto ids = torch::zeros({B}, torch::kInt64);
  for (int64_t b = 0; b < B; ++b) {
    if (labels[b] < 1 || labels[b] > styles)
      throw RangeError("style label " + std::to_string(labels[b]) +
                       " outside [1, " + std::to_string(styles) + "]");
    ids[b] = labels[b];
  }
  if (mode == StyleMode::kEmbedding) return table->forward(ids);
  return torch::one_hot(ids - 1, styles).to(torch::kFloat32);
}

DecoderImpl::DecoderImpl(const NetConfig& cfg)
    : condition_length(cfg.condition_length()),
      dropout_on_output(cfg.dropout_on_output) {
  using namespace torch::nn;
  for (int j = 1; j <= 8; ++j) {
    // Skip concatenation doubles every input except the innermost.
    const int in = j == 1 ? condition_length : 2 * kDecoderChannels[j - 1];
    const int out = kDecoderChannels[j];
    auto deconv = ConvTranspose2d(ConvTranspose2dOptions(in, out, 5)
                                      .stride(2)
                                      .padding(2)
                                      .output_padding(1)
                                      .bias(j == 8));
    Sequential block;
    block->push_back(deconv);
    if (j < 8) {
      block->push_back(BatchNorm2d(out));
      block->push_back(ReLU());
    } else {
      block->push_back(Tanh());
    }
    blocks.push_back(block);
    register_module("L" + std::to_string(j), blocks.back());
  }
  dropout = register_module("dropout", torch::nn::Dropout(0.5));
}

torch::Tensor DecoderImpl::forward(const torch::Tensor& condition,
                                   const std::vector<torch::Tensor>& skips) {
  if (condition.dim() != 2 || condition.size(1) != condition_length)
    throw ShapeError("decoder condition length " +
                     std::to_string(condition.dim() == 2 ? condition.size(1)
                                                         : -1) +
                     ", expected " + std::to_string(condition_length));
  if (skips.size() != 7) throw ShapeError("decoder expects 7 skip activations");

  auto h = condition.unsqueeze(-1).unsqueeze(-1);  // {B, C, 1, 1}
  for (int j = 1; j <= 8; ++j) {
    if (j > 1) h = torch::cat({h, skips[8 - j]}, 1);  // encoder L(9-j)
    if (j == 8 && dropout_on_output) h = dropout->forward(h);
    h = blocks[j - 1]->forward(h);
  }
  return h;
}

DiscriminatorImpl::DiscriminatorImpl(int styles) {
  using namespace torch::nn;
  trunk = register_module(
      "trunk",
      Sequential(Conv2d(Conv2dOptions(2, 64, 5).stride(1).padding(2).bias(false)),
                 BatchNorm2d(64), ReLU(),
                 Conv2d(Conv2dOptions(64, 128, 5).stride(2).padding(2).bias(false)),
                 BatchNorm2d(128), ReLU(),
                 Conv2d(Conv2dOptions(128, 256, 5).stride(2).padding(2).bias(false)),
                 BatchNorm2d(256), ReLU()));
  const int64_t flat = 64 * 64 * 256;
  head_real = register_module("head_real", Linear(flat, 1));
  head_style = register_module("head_style", Linear(flat, styles));
}

DiscriminatorOutput DiscriminatorImpl::forward(const torch::Tensor& x,
                                               const torch::Tensor& img) {
  check_glyph_batch(x);
  check_glyph_batch(img);
  if (x.size(0) != img.size(0))
    throw ShapeError("discriminator pair batch sizes differ");
  auto h = trunk->forward(torch::cat({x, img}, 1)).flatten(1);
  return {head_real->forward(h).squeeze(-1), head_style->forward(h)};
}

GeneratorImpl::GeneratorImpl(const NetConfig& cfg) : config(cfg) {
  encoder = register_module("encoder", ImageEncoder());
  if (cfg.components_enabled)
    component_encoder =
        register_module("component_encoder", ComponentEncoder(cfg));
  style_encoder = register_module("style_encoder", StyleEncoder(cfg));
  decoder = register_module("decoder", Decoder(cfg));
}

torch::Tensor GeneratorImpl::forward(
    const torch::Tensor& x, const std::vector<StyleLabel>& styles,
    const std::vector<ComponentSequence>& components) {
  auto enc = encoder->forward(x);
  std::vector<torch::Tensor> parts = {enc.feature};
  if (config.style_mode != StyleMode::kDisabled)
    parts.push_back(style_encoder->forward(styles));
  if (config.components_enabled)
    parts.push_back(component_encoder->forward(components));
  return decoder->forward(torch::cat(parts, 1), enc.skips);
}

torch::Tensor GeneratorImpl::encode(const torch::Tensor& x) {
  return encoder->forward(x).feature;
}

void init_weights(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (const auto& pair : module.named_parameters()) {
    const auto& name = pair.key();
    auto& p = pair.value();
    if (name.find("lstm") != std::string::npos) continue;  // torch default
    if (name.ends_with("bias")) {
      p.zero_();
    } else if (name.find("norm") != std::string::npos ||
               (p.dim() == 1 && name.ends_with("weight"))) {
      p.normal_(1.0, 0.02);  // BN scale
    } else {
      p.normal_(0.0, 0.02);
    }
  }
}

}  // namespace glyphgan
