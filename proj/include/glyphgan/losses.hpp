#ifndef GLYPHGAN_LOSSES_HPP
#define GLYPHGAN_LOSSES_HPP

#include <torch/torch.h>

#include "glyphgan/dataset.hpp"
#include "glyphgan/networks.hpp"

namespace glyphgan {

struct LossWeights {
  double lambda_p = 100.0;
  double lambda_c = 15.0;
  double lambda_s = 1.0;
};

// Scalar view of one training step, serialized into the metrics log.
struct LossReport {
  double adv_d = 0;       // discriminator adversarial term
  double adv_g = 0;       // generator (non-saturating) adversarial term
  double pixel = 0;
  double constancy = 0;
  double category = 0;    // real + fake cross-entropy terms
  double total_g = 0;
  double total_d = 0;
};

// Mean absolute pixel difference.
torch::Tensor pixel_loss(const torch::Tensor& y, const torch::Tensor& y_hat);

// Mean absolute difference of encoder features of x and y_hat under the
// same encoder parameters.
torch::Tensor constancy_loss(const torch::Tensor& x, const torch::Tensor& y_hat,
                             ImageEncoder& encoder);

struct AdversarialTerms {
  torch::Tensor d_loss;  // -[log s(d_real) + log(1 - s(d_fake))]
  torch::Tensor g_loss;  // -log s(d_fake)
};
// Numerically stable at extreme logits (fused log-sigmoid form).
AdversarialTerms adversarial_terms(const torch::Tensor& d_real,
                                   const torch::Tensor& d_fake);

// Softmax cross-entropy of both pairs' style logits against label s,
// returned as a positive loss. Labels are 1-based.
torch::Tensor category_loss(const torch::Tensor& style_logits_real,
                            const torch::Tensor& style_logits_fake,
                            const std::vector<StyleLabel>& labels, int styles);

torch::Tensor category_term(const torch::Tensor& style_logits,
                            const std::vector<StyleLabel>& labels, int styles);

// Combined objective. The generator minimizes the non-saturating
// adversarial term plus the weighted pixel, constancy, and fake-pair
// category terms; the discriminator minimizes its adversarial term plus
// the weighted real-pair category term.
LossReport total_losses(double adv_d, double adv_g, double pixel,
                        double constancy, double category_real,
                        double category_fake, const LossWeights& w);

}  // namespace glyphgan

#endif
