#include "glyphgan/losses.hpp"

#include "glyphgan/errors.hpp"

namespace glyphgan {

torch::Tensor pixel_loss(const torch::Tensor& y, const torch::Tensor& y_hat) {
  if (!y.sizes().equals(y_hat.sizes()))
    throw ShapeError("pixel_loss: shape mismatch");
  return torch::l1_loss(y_hat, y);
}

torch::Tensor constancy_loss(const torch::Tensor& x, const torch::Tensor& y_hat,
                             ImageEncoder& encoder) {
  auto fx = encoder->forward(x).feature;
  auto fy = encoder->forward(y_hat).feature;
  return torch::l1_loss(fy, fx);
}

AdversarialTerms adversarial_terms(const torch::Tensor& d_real,
                                   const torch::Tensor& d_fake) {
  namespace F = torch::nn::functional;
  using Opts = F::BinaryCrossEntropyWithLogitsFuncOptions;
  auto ones_r = torch::ones_like(d_real);
  auto zeros_f = torch::zeros_like(d_fake);
  auto d_loss = F::binary_cross_entropy_with_logits(d_real, ones_r, Opts{}) +
                F::binary_cross_entropy_with_logits(d_fake, zeros_f, Opts{});
  auto g_loss = F::binary_cross_entropy_with_logits(
      d_fake, torch::ones_like(d_fake), Opts{});
  return {d_loss, g_loss};
}

torch::Tensor category_term(const torch::Tensor& style_logits,
                            const std::vector<StyleLabel>& labels, int styles) {
  if (style_logits.dim() != 2 || style_logits.size(1) != styles)
    throw ShapeError("category loss: logits must be {B, S}");
  if (style_logits.size(0) != static_cast<int64_t>(labels.size()))
    throw ShapeError("category loss: batch size mismatch");
  auto target = torch::zeros({style_logits.size(0)}, torch::kInt64);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > styles)
      throw RangeError("style label " + std::to_string(labels[i]) +
                       " outside [1, " + std::to_string(styles) + "]");
    target[static_cast<int64_t>(i)] = labels[i] - 1;
  }
  return torch::nn::functional::cross_entropy(style_logits, target);
}

torch::Tensor category_loss(const torch::Tensor& style_logits_real,
                            const torch::Tensor& style_logits_fake,
                            const std::vector<StyleLabel>& labels, int styles) {
  return category_term(style_logits_real, labels, styles) +
         category_term(style_logits_fake, labels, styles);
}

LossReport total_losses(double adv_d, double adv_g, double pixel,
                        double constancy, double category_real,
                        double category_fake, const LossWeights& w) {
  LossReport r;
  r.adv_d = adv_d;
  r.adv_g = adv_g;
  r.pixel = pixel;
  r.constancy = constancy;
  r.category = category_real + category_fake;
  r.total_g = adv_g + w.lambda_p * pixel + w.lambda_c * constancy +
              w.lambda_s * category_fake;
  r.total_d = adv_d + w.lambda_s * category_real;
  return r;
}

}  // namespace glyphgan
