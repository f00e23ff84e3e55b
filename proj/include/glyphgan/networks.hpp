#ifndef GLYPHGAN_NETWORKS_HPP
#define GLYPHGAN_NETWORKS_HPP

#include <torch/torch.h>

#include <vector>

#include "glyphgan/components.hpp"
#include "glyphgan/dataset.hpp"

namespace glyphgan {

enum class StyleMode { kOneHot, kEmbedding, kDisabled };

StyleMode style_mode_from_string(const std::string& s);
std::string to_string(StyleMode mode);

struct NetConfig {
  int styles = 7;
  StyleMode style_mode = StyleMode::kOneHot;
  int style_embed_width = 128;  // ablation baseline only
  bool components_enabled = true;
  int component_vocab = kDefaultComponentVocabSize;
  int component_embed_width = 128;
  int component_feature_width = 256;
  // Dropout 0.5 sits in front of the decoder's final deconvolution.
  bool dropout_on_output = true;

  int style_width() const;
  int condition_length() const;  // 775 in the full one-hot configuration

  bool operator==(const NetConfig&) const = default;
};

constexpr int kImageFeatureWidth = 512;

// Unit basis vector e_s, 1-based label.
torch::Tensor one_hot_style(StyleLabel s, int styles);

struct EncoderOutput {
  torch::Tensor feature;              // v_i, {B, 512}
  std::vector<torch::Tensor> skips;   // L1..L7 activations
};

// Image encoder E_i: eight 5x5 stride-2 conv blocks, BN, LeakyReLU 0.2.
struct ImageEncoderImpl : torch::nn::Module {
  ImageEncoderImpl();
  EncoderOutput forward(const torch::Tensor& x);

  std::vector<torch::nn::Sequential> blocks;
};
TORCH_MODULE(ImageEncoder);

// Component encoder E_c: 128-d embedding feeding a single-layer LSTM with
// 256 hidden units; the final hidden state is v_c.
struct ComponentEncoderImpl : torch::nn::Module {
  explicit ComponentEncoderImpl(const NetConfig& cfg);
  // One variable-length sequence per batch element.
  torch::Tensor forward(const std::vector<ComponentSequence>& batch);

  torch::nn::Embedding embedding{nullptr};
  torch::nn::LSTM lstm{nullptr};
  int vocab;
};
TORCH_MODULE(ComponentEncoder);

// Style branch: one-hot (parameter-free), learned embedding row, or absent.
struct StyleEncoderImpl : torch::nn::Module {
  explicit StyleEncoderImpl(const NetConfig& cfg);
  // Labels are 1-based; returns {B, style_width()} or an empty tensor in
  // disabled mode.
  torch::Tensor forward(const std::vector<StyleLabel>& labels);

  torch::nn::Embedding table{nullptr};
  StyleMode mode;
  int styles;
};
TORCH_MODULE(StyleEncoder);

// Decoder G: deconvolution ladder with mirror skip concatenation; decoder
// layer j consumes encoder activation L(9-j). tanh output, no BN on L8.
struct DecoderImpl : torch::nn::Module {
  explicit DecoderImpl(const NetConfig& cfg);
  torch::Tensor forward(const torch::Tensor& condition,
                        const std::vector<torch::Tensor>& skips);

  std::vector<torch::nn::Sequential> blocks;
  torch::nn::Dropout dropout{nullptr};
  int condition_length;
  bool dropout_on_output;
};
TORCH_MODULE(Decoder);

struct DiscriminatorOutput {
  torch::Tensor realness;      // {B}, logit
  torch::Tensor style_logits;  // {B, S}
};

// Image-pair discriminator with auxiliary style head; three shared conv
// blocks (L1 stride 1), independent linear heads.
struct DiscriminatorImpl : torch::nn::Module {
  explicit DiscriminatorImpl(int styles);
  DiscriminatorOutput forward(const torch::Tensor& x, const torch::Tensor& img);

  torch::nn::Sequential trunk{nullptr};
  torch::nn::Linear head_real{nullptr};
  torch::nn::Linear head_style{nullptr};
};
TORCH_MODULE(Discriminator);

// Full generator: E_i + E_c + style branch + G.
struct GeneratorImpl : torch::nn::Module {
  explicit GeneratorImpl(const NetConfig& cfg);

  torch::Tensor forward(const torch::Tensor& x,
                        const std::vector<StyleLabel>& styles,
                        const std::vector<ComponentSequence>& components);
  // v_i only, for the constancy loss.
  torch::Tensor encode(const torch::Tensor& x);

  NetConfig config;
  ImageEncoder encoder{nullptr};
  ComponentEncoder component_encoder{nullptr};
  StyleEncoder style_encoder{nullptr};
  Decoder decoder{nullptr};
};
TORCH_MODULE(Generator);

// Zero-mean Gaussian (sigma 0.02) on conv/deconv/linear/embedding weights;
// BN scale around 1.
void init_weights(torch::nn::Module& module);

void check_glyph_batch(const torch::Tensor& t);

}  // namespace glyphgan

#endif
