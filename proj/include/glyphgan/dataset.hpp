#ifndef GLYPHGAN_DATASET_HPP
#define GLYPHGAN_DATASET_HPP

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "glyphgan/components.hpp"
#include "glyphgan/image.hpp"

namespace glyphgan {

using StyleLabel = int;  // 1-based

struct TrainingSample {
  CharacterCode character;
  StyleLabel style;
  torch::Tensor source;  // x, {1,256,256}
  torch::Tensor target;  // y, {1,256,256}
  ComponentSequence components;
};

struct DatasetSplit {
  std::set<CharacterCode> train_chars;
  std::set<CharacterCode> test_chars;
  uint64_t seed = 0;
};

// Test characters are sampled without replacement from the intersection of
// all per-style character sets; everything else trains. Pure in its
// arguments: identical seed means identical split.
DatasetSplit split_dataset(
    const std::map<StyleLabel, std::set<CharacterCode>>& chars_by_style,
    int test_count, uint64_t seed);

void write_split_manifest(const DatasetSplit& split,
                          const std::filesystem::path& path);
DatasetSplit read_split_manifest(const std::filesystem::path& path);

// On-disk corpus: `<root>/<style-id>/<hex-codepoint>.png` ground truth,
// `<root>/source/<hex-codepoint>.png` font-rendered inputs.
class Corpus {
 public:
  explicit Corpus(std::filesystem::path root);

  const std::map<StyleLabel, std::map<CharacterCode, std::filesystem::path>>&
  by_style() const {
    return by_style_;
  }
  std::map<StyleLabel, std::set<CharacterCode>> chars_by_style() const;
  std::set<CharacterCode> all_chars() const;
  int style_count() const { return static_cast<int>(by_style_.size()); }
  const DirectoryGlyphProvider& source_provider() const { return source_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::map<StyleLabel, std::map<CharacterCode, std::filesystem::path>> by_style_;
  DirectoryGlyphProvider source_;
};

struct SampleSpec {
  CharacterCode character;
  StyleLabel style;
  std::filesystem::path target_path;
};

// Lazily materialized stream of training samples. Loading is pure per
// index; shuffling is imposed by the training engine.
class SampleSet {
 public:
  SampleSet(std::vector<SampleSpec> specs, const ComponentDictionary* dict,
            const GlyphProvider* provider);

  std::size_t size() const { return specs_.size(); }
  const std::vector<SampleSpec>& specs() const { return specs_; }
  // Throws DataError on unreadable images, MissingCharacterError /
  // MissingGlyphError on absent entries.
  TrainingSample load(std::size_t i) const;

 private:
  std::vector<SampleSpec> specs_;
  const ComponentDictionary* dict_;
  const GlyphProvider* provider_;
};

// Collects the (character, style) pairs selected by `split` from the corpus.
// With skip_missing, samples whose character lacks a dictionary entry or a
// source glyph are dropped and counted; otherwise the first one throws.
struct BuildReport {
  std::size_t skipped_missing_dict = 0;
  std::size_t skipped_missing_glyph = 0;
};
SampleSet build_samples(const DatasetSplit& split, const Corpus& corpus,
                        const ComponentDictionary& dict, bool train_side,
                        bool skip_missing = false,
                        BuildReport* report = nullptr);

// Per-style train/test/total sample counts plus totals row.
struct SplitStatistics {
  std::map<StyleLabel, int> train;
  std::map<StyleLabel, int> test;
  int train_total = 0;
  int test_total = 0;
};
SplitStatistics split_statistics(const DatasetSplit& split, const Corpus& corpus);
std::string format_statistics(const SplitStatistics& stats);

// Deterministic per-epoch shuffle keyed on (seed, epoch).
std::vector<std::size_t> shuffled_indices(std::size_t n, uint64_t seed,
                                          int epoch);

}  // namespace glyphgan

#endif
