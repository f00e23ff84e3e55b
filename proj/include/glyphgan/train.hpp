#ifndef GLYPHGAN_TRAIN_HPP
#define GLYPHGAN_TRAIN_HPP

#include <torch/torch.h>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "glyphgan/checkpoint.hpp"
#include "glyphgan/dataset.hpp"
#include "glyphgan/losses.hpp"
#include "glyphgan/metrics.hpp"
#include "glyphgan/networks.hpp"

namespace glyphgan {

enum class DecayMode { kPerEpoch, kSingle };

struct TrainConfig {
  NetConfig net;
  int batch_size = 16;
  int epochs = 40;
  double lr_initial = 0.001;
  double lr_decay = 0.5;
  int lr_constant_epochs = 20;  // phase 1 length
  DecayMode decay_mode = DecayMode::kPerEpoch;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int g_steps_per_d_step = 2;
  LossWeights weights;
  uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Flat `key = value` text file holding exactly the TrainConfig fields;
// `#` starts a comment. Unknown keys are errors.
TrainConfig parse_train_config(const std::filesystem::path& path);
TrainConfig parse_train_config_text(const std::string& text);
void apply_overrides(TrainConfig& cfg,
                     const std::map<std::string, std::string>& overrides);
std::string train_config_to_text(const TrainConfig& cfg);

// Learning rate for a 1-based epoch: constant for phase 1, then either
// halved once or halved per epoch.
double lr_at(int epoch, const TrainConfig& cfg);

struct Batch {
  torch::Tensor x;  // {B,1,256,256}
  torch::Tensor y;
  std::vector<StyleLabel> styles;
  std::vector<ComponentSequence> components;
};
Batch make_batch(const SampleSet& set, const std::vector<std::size_t>& indices);

// One logical training loop: one discriminator update followed by
// g_steps_per_d_step generator updates on the same batch, Adam throughout.
class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);  // fresh seeded initialization
  Trainer(TrainConfig cfg, const Checkpoint& resume);

  // Throws DivergenceError when any loss part goes non-finite.
  LossReport train_step(const Batch& batch);

  // Full training run. Per-step metrics lines go to `metrics` when set;
  // checkpoints are written through `sink` (epoch checkpoints plus a
  // best-by-validation-SSIM one when a validation set is given).
  struct Sink {
    std::function<void(const Checkpoint&, const std::string& tag)> write;
  };
  void train(const SampleSet& train_set, std::ostream* metrics,
             const Sink* sink = nullptr, const SampleSet* validation = nullptr);

  Checkpoint snapshot() const;
  void set_lr(double lr);

  Generator& generator() { return generator_; }
  Discriminator& discriminator() { return discriminator_; }
  const TrainConfig& config() const { return cfg_; }
  long step() const { return step_; }
  int epoch() const { return epoch_; }
  long d_updates = 0;  // instrumentation for the update-ratio property
  long g_updates = 0;

 private:
  TrainConfig cfg_;
  Generator generator_{nullptr};
  Discriminator discriminator_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_g_;
  std::unique_ptr<torch::optim::Adam> opt_d_;
  long step_ = 0;        // global train_step counter
  int epoch_ = 1;        // current 1-based epoch
  long batch_in_epoch_ = 0;
  double best_val_ssim_ = -2.0;
};

std::string metrics_line(long step, int epoch, const LossReport& r, double lr);

// Trains each configuration from scratch with the identical seed and data
// order, then evaluates on the test set.
struct AblationRow {
  std::string name;
  MetricPair metrics;
};
std::vector<AblationRow> run_ablation(
    const std::vector<std::pair<std::string, NetConfig>>& matrix,
    const TrainConfig& base, const SampleSet& train_set,
    const SampleSet& test_set);
std::string format_ablation(const std::vector<AblationRow>& rows);

}  // namespace glyphgan

#endif
