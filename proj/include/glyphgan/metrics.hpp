#ifndef GLYPHGAN_METRICS_HPP
#define GLYPHGAN_METRICS_HPP

#include <torch/torch.h>

#include <map>
#include <string>

#include "glyphgan/dataset.hpp"
#include "glyphgan/networks.hpp"

namespace glyphgan {

struct MetricPair {
  double mse = 0;
  double ssim = 0;
};

// Both metrics operate on the 8-bit intensity mapping of [-1,1] glyphs.
// MSE is mean squared difference divided by 255 (documented scale).
double mse(const torch::Tensor& y, const torch::Tensor& y_hat);

// Single-scale SSIM, 11x11 Gaussian window sigma 1.5, K1=0.01, K2=0.03,
// dynamic range 255, mean over the valid-window map.
double ssim(const torch::Tensor& y, const torch::Tensor& y_hat);

struct EvalReport {
  std::map<StyleLabel, MetricPair> per_style;
  std::map<StyleLabel, int> sample_count;
  MetricPair overall;  // sample-count-weighted mean
  int excluded = 0;    // unreadable test images
};

// Generates y_hat for every test pair in inference mode and aggregates
// metrics per style. Deterministic.
EvalReport evaluate(Generator& generator, const SampleSet& test_set);

std::string format_report(const EvalReport& report);      // aligned table
std::string report_to_tsv(const EvalReport& report);      // machine-readable

}  // namespace glyphgan

#endif
