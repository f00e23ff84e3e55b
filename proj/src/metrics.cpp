#include "glyphgan/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "glyphgan/errors.hpp"

namespace glyphgan {

namespace {

torch::Tensor to_intensity(const torch::Tensor& glyph) {
  return ((glyph.to(torch::kFloat64) + 1.0) * 127.5);
}

torch::Tensor gaussian_window(int size, double sigma) {
  auto coords = torch::arange(size, torch::kFloat64) - (size - 1) / 2.0;
  auto g = torch::exp(-coords.square() / (2.0 * sigma * sigma));
  g /= g.sum();
  return g.outer(g).view({1, 1, size, size});
}

}  // namespace

double mse(const torch::Tensor& y, const torch::Tensor& y_hat) {
  if (!y.sizes().equals(y_hat.sizes())) throw ShapeError("mse: shape mismatch");
  auto d = to_intensity(y) - to_intensity(y_hat);
  return d.square().mean().item<double>() / 255.0;
}

double ssim(const torch::Tensor& y, const torch::Tensor& y_hat) {
  if (!y.sizes().equals(y_hat.sizes())) throw ShapeError("ssim: shape mismatch");
  constexpr int kWindow = 11;
  constexpr double kSigma = 1.5;
  constexpr double kL = 255.0;
  const double c1 = (0.01 * kL) * (0.01 * kL);
  const double c2 = (0.03 * kL) * (0.03 * kL);

  namespace F = torch::nn::functional;
  auto w = gaussian_window(kWindow, kSigma);
  auto conv = [&](const torch::Tensor& t) {
    return F::conv2d(t, w, F::Conv2dFuncOptions());  // valid region only
  };

  auto a = to_intensity(y).view({1, 1, y.size(-2), y.size(-1)});
  auto b = to_intensity(y_hat).view({1, 1, y.size(-2), y.size(-1)});
  auto mu_a = conv(a);
  auto mu_b = conv(b);
  auto mu_aa = mu_a.square();
  auto mu_bb = mu_b.square();
  auto mu_ab = mu_a * mu_b;
  auto sigma_aa = conv(a * a) - mu_aa;
  auto sigma_bb = conv(b * b) - mu_bb;
  auto sigma_ab = conv(a * b) - mu_ab;

  auto map = ((2.0 * mu_ab + c1) * (2.0 * sigma_ab + c2)) /
             ((mu_aa + mu_bb + c1) * (sigma_aa + sigma_bb + c2));
  return map.mean().item<double>();
}

EvalReport evaluate(Generator& generator, const SampleSet& test_set) {
  const bool was_training = generator->is_training();
  generator->eval();
  torch::NoGradGuard no_grad;

  EvalReport report;
  std::map<StyleLabel, double> mse_sum, ssim_sum;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    TrainingSample s;
    try {
      s = test_set.load(i);
    } catch (const DataError&) {
      ++report.excluded;
      continue;
    }
    auto y_hat = generator->forward(s.source.unsqueeze(0), {s.style},
                                    {s.components})
                     .squeeze(0);
    mse_sum[s.style] += mse(s.target, y_hat);
    ssim_sum[s.style] += ssim(s.target, y_hat);
    ++report.sample_count[s.style];
  }

  double mse_total = 0, ssim_total = 0;
  int n_total = 0;
  for (const auto& [style, n] : report.sample_count) {
    report.per_style[style] = {mse_sum[style] / n, ssim_sum[style] / n};
    mse_total += mse_sum[style];
    ssim_total += ssim_sum[style];
    n_total += n;
  }
  if (n_total > 0)
    report.overall = {mse_total / n_total, ssim_total / n_total};

  if (was_training) generator->train();
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed;
  out << std::setw(8) << "Style" << std::setw(12) << "MSE" << std::setw(12)
      << "SSIM" << std::setw(10) << "Count" << "\n";
  for (const auto& [style, m] : report.per_style)
    out << std::setw(8) << style << std::setw(12) << std::setprecision(4)
        << m.mse << std::setw(12) << m.ssim << std::setw(10)
        << report.sample_count.at(style) << "\n";
  out << std::setw(8) << "overall" << std::setw(12) << report.overall.mse
      << std::setw(12) << report.overall.ssim << "\n";
  if (report.excluded > 0)
    out << "excluded (unreadable): " << report.excluded << "\n";
  return out.str();
}

std::string report_to_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "style\tmse\tssim\tcount\n";
  for (const auto& [style, m] : report.per_style)
    out << style << '\t' << m.mse << '\t' << m.ssim << '\t'
        << report.sample_count.at(style) << '\n';
  out << "overall\t" << report.overall.mse << '\t' << report.overall.ssim
      << '\t' << "" << '\n';
  return out.str();
}

}  // namespace glyphgan
