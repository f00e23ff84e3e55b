#include "glyphgan/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "glyphgan/errors.hpp"
#include "glyphgan/utf8.hpp"

namespace glyphgan {

DatasetSplit split_dataset(
    const std::map<StyleLabel, std::set<CharacterCode>>& chars_by_style,
    int test_count, uint64_t seed) {
  if (chars_by_style.empty())
    throw ConfigError("split_dataset: no styles given");
  if (test_count < 0) throw ConfigError("split_dataset: negative test_count");

  // Characters available in every style; sorted vector for determinism.
  std::set<CharacterCode> common = chars_by_style.begin()->second;
  std::set<CharacterCode> all;
  for (const auto& [style, chars] : chars_by_style) {
    std::set<CharacterCode> kept;
    std::ranges::set_intersection(common, chars,
                                  std::inserter(kept, kept.begin()));
    common = std::move(kept);
    all.insert(chars.begin(), chars.end());
  }
  if (test_count > static_cast<int>(common.size()))
    throw ConfigError("split_dataset: test_count " + std::to_string(test_count) +
                      " exceeds the " + std::to_string(common.size()) +
                      " characters common to all styles");

  std::vector<CharacterCode> pool(common.begin(), common.end());
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::shuffle's tail behavior is not pinned by the
  // standard, this is.
  for (int i = 0; i < test_count; ++i) {
    const auto j = i + rng() % (pool.size() - i);
    std::swap(pool[i], pool[j]);
  }

  DatasetSplit split;
  split.seed = seed;
  split.test_chars.insert(pool.begin(), pool.begin() + test_count);
  for (CharacterCode c : all)
    if (!split.test_chars.count(c)) split.train_chars.insert(c);
  return split;
}

void write_split_manifest(const DatasetSplit& split,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << "# seed " << split.seed << "\n";
  // One line per character, sorted by code point; byte-exact artifact.
  std::map<CharacterCode, const char*> rows;
  for (CharacterCode c : split.train_chars) rows[c] = "train";
  for (CharacterCode c : split.test_chars) rows[c] = "test";
  for (const auto& [c, tag] : rows)
    out << codepoint_hex(c) << '\t' << tag << '\n';
}

DatasetSplit read_split_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  DatasetSplit split;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string key;
      if (hdr >> key >> split.seed && key == "seed") continue;
      continue;
    }
    std::istringstream row(line);
    std::string hex, tag;
    if (!(row >> hex >> tag) || (tag != "train" && tag != "test"))
      throw ParseError(path.string(), line_no, "expected `<hex> train|test`");
    CharacterCode c = static_cast<CharacterCode>(std::stoul(hex, nullptr, 16));
    (tag == "train" ? split.train_chars : split.test_chars).insert(c);
  }
  return split;
}

Corpus::Corpus(std::filesystem::path root)
    : root_(std::move(root)), source_(root_ / "source") {
  if (!std::filesystem::is_directory(root_))
    throw DataError("corpus root is not a directory: " + root_.string());
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "source") continue;
    StyleLabel style;
    try {
      std::size_t pos;
      style = std::stoi(name, &pos);
      if (pos != name.size() || style < 1) continue;
    } catch (const std::exception&) {
      continue;
    }
    auto& chars = by_style_[style];
    for (const auto& file : std::filesystem::directory_iterator(entry.path())) {
      if (file.path().extension() != ".png") continue;
      const std::string stem = file.path().stem().string();
      try {
        chars[static_cast<CharacterCode>(std::stoul(stem, nullptr, 16))] =
            file.path();
      } catch (const std::exception&) {
        throw DataError("corpus file name is not a hex code point: " +
                        file.path().string());
      }
    }
  }
  if (by_style_.empty())
    throw DataError("corpus has no style directories: " + root_.string());
}

std::map<StyleLabel, std::set<CharacterCode>> Corpus::chars_by_style() const {
  std::map<StyleLabel, std::set<CharacterCode>> out;
  for (const auto& [style, chars] : by_style_)
    for (const auto& [c, path] : chars) out[style].insert(c);
  return out;
}

std::set<CharacterCode> Corpus::all_chars() const {
  std::set<CharacterCode> out;
  for (const auto& [style, chars] : by_style_)
    for (const auto& [c, path] : chars) out.insert(c);
  return out;
}

SampleSet::SampleSet(std::vector<SampleSpec> specs,
                     const ComponentDictionary* dict,
                     const GlyphProvider* provider)
    : specs_(std::move(specs)), dict_(dict), provider_(provider) {}

TrainingSample SampleSet::load(std::size_t i) const {
  const SampleSpec& spec = specs_.at(i);
  TrainingSample s;
  s.character = spec.character;
  s.style = spec.style;
  s.components = dict_->decompose(spec.character);
  try {
    s.target = normalize_glyph(read_png(spec.target_path));
  } catch (const DataError& e) {
    throw DataError("sample " + spec.target_path.string() + ": " + e.what());
  }
  s.source = render_source_glyph(spec.character, *provider_);
  return s;
}

SampleSet build_samples(const DatasetSplit& split, const Corpus& corpus,
                        const ComponentDictionary& dict, bool train_side,
                        bool skip_missing, BuildReport* report) {
  const auto& wanted = train_side ? split.train_chars : split.test_chars;
  BuildReport local;
  std::vector<SampleSpec> specs;
  for (const auto& [style, chars] : corpus.by_style()) {
    for (const auto& [c, path] : chars) {
      if (!wanted.count(c)) continue;
      if (!dict.contains(c)) {
        if (!skip_missing) throw MissingCharacterError(c);
        ++local.skipped_missing_dict;
        continue;
      }
      if (!corpus.source_provider().has(c)) {
        if (!skip_missing)
          throw MissingGlyphError("no source glyph for U+" +
                                  MissingCharacterError::to_hex(c));
        ++local.skipped_missing_glyph;
        continue;
      }
      specs.push_back({c, style, path});
    }
  }
  if (report) *report = local;
  return SampleSet(std::move(specs), &dict, &corpus.source_provider());
}

SplitStatistics split_statistics(const DatasetSplit& split,
                                 const Corpus& corpus) {
  SplitStatistics stats;
  for (const auto& [style, chars] : corpus.by_style()) {
    int tr = 0, te = 0;
    for (const auto& [c, path] : chars) {
      if (split.test_chars.count(c))
        ++te;
      else if (split.train_chars.count(c))
        ++tr;
    }
    stats.train[style] = tr;
    stats.test[style] = te;
    stats.train_total += tr;
    stats.test_total += te;
  }
  return stats;
}

std::string format_statistics(const SplitStatistics& stats) {
  std::ostringstream out;
  out << "Style";
  for (const auto& [style, n] : stats.train) out << '\t' << style;
  out << "\tTotal\n";
  out << "Training";
  for (const auto& [style, n] : stats.train) out << '\t' << n;
  out << '\t' << stats.train_total << '\n';
  out << "Test";
  for (const auto& [style, n] : stats.test) out << '\t' << n;
  out << '\t' << stats.test_total << '\n';
  out << "Total";
  for (const auto& [style, n] : stats.train)
    out << '\t' << (n + stats.test.at(style));
  out << '\t' << (stats.train_total + stats.test_total) << '\n';
  return out.str();
}

std::vector<std::size_t> shuffled_indices(std::size_t n, uint64_t seed,
                                          int epoch) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(epoch));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = i + rng() % (n - i);
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace glyphgan
