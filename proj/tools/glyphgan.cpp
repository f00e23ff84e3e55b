// Command-line surface: prepare / train / generate / evaluate / ablate.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "glyphgan/checkpoint.hpp"
#include "glyphgan/dataset.hpp"
#include "glyphgan/errors.hpp"
#include "glyphgan/image.hpp"
#include "glyphgan/metrics.hpp"
#include "glyphgan/train.hpp"
#include "glyphgan/utf8.hpp"

namespace fs = std::filesystem;
using namespace glyphgan;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

struct CommonOpts {
  std::string config;
  std::string corpus;
  std::string dictionary;
  std::string checkpoint;
  std::string out;
  std::string manifest;
  uint64_t seed = 0;
  bool seed_set = false;
  bool skip_missing = false;
  int styles_count = 0;
  std::string mode;
};

TrainConfig load_config(const CommonOpts& opts) {
  TrainConfig cfg;
  if (!opts.config.empty()) cfg = parse_train_config(opts.config);
  // Flags win over file values.
  std::map<std::string, std::string> overrides;
  if (opts.seed_set) overrides["seed"] = std::to_string(opts.seed);
  if (opts.styles_count > 0) overrides["styles"] = std::to_string(opts.styles_count);
  if (!opts.mode.empty()) overrides["style_mode"] = opts.mode;
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

ComponentDictionary load_dict(const CommonOpts& opts, int vocab) {
  if (opts.dictionary.empty())
    throw ConfigError("--dictionary is required");
  return ComponentDictionary::load(opts.dictionary, vocab);
}

int cmd_prepare(const CommonOpts& opts, int test_count) {
  TrainConfig cfg = load_config(opts);
  Corpus corpus(opts.corpus);
  auto dict = load_dict(opts, cfg.net.component_vocab);

  auto missing = dict.missing_from(corpus.all_chars());
  if (!missing.empty() && !opts.skip_missing) {
    std::cerr << "error: " << missing.size()
              << " corpus characters have no dictionary entry:";
    for (CharacterCode c : missing) std::cerr << " U+" << codepoint_hex(c);
    std::cerr << "\nuse --skip-missing to drop them\n";
    return kExitData;
  }

  auto chars_by_style = corpus.chars_by_style();
  if (!missing.empty())
    for (auto& [style, chars] : chars_by_style)
      for (CharacterCode c : missing) chars.erase(c);

  auto split = split_dataset(chars_by_style, test_count,
                             opts.seed_set ? opts.seed : cfg.seed);

  fs::create_directories(opts.out);
  write_split_manifest(split, fs::path(opts.out) / "split.txt");

  auto stats = split_statistics(split, corpus);
  std::ofstream stats_out(fs::path(opts.out) / "statistics.tsv");
  stats_out << format_statistics(stats);
  std::cout << format_statistics(stats);
  if (!missing.empty())
    std::cout << "skipped " << missing.size()
              << " characters without dictionary entries\n";

  // Normalized-image cache, written in the model's 8-bit mapping.
  for (const auto& [style, chars] : corpus.by_style()) {
    fs::path dir = fs::path(opts.out) / "cache" / std::to_string(style);
    fs::create_directories(dir);
    for (const auto& [c, path] : chars) {
      if (missing.count(c)) continue;
      auto glyph = normalize_glyph(read_png(path));
      write_png(dir / (codepoint_hex(c) + ".png"), glyph_to_u8(glyph));
    }
  }
  std::cout << "wrote " << (fs::path(opts.out) / "split.txt").string() << "\n";
  return 0;
}

Trainer::Sink file_sink(const fs::path& dir) {
  return {[dir](const Checkpoint& ckpt, const std::string& tag) {
    save_checkpoint(ckpt, dir / (tag + ".ckpt"));
  }};
}

int cmd_train(const CommonOpts& opts) {
  TrainConfig cfg = load_config(opts);
  Corpus corpus(opts.corpus);
  auto dict = load_dict(opts, cfg.net.component_vocab);

  DatasetSplit split;
  if (!opts.manifest.empty()) {
    split = read_split_manifest(opts.manifest);
  } else {
    split.train_chars = corpus.all_chars();
    split.seed = cfg.seed;
  }
  auto train_set = build_samples(split, corpus, dict, /*train_side=*/true,
                                 opts.skip_missing);
  auto test_set = build_samples(split, corpus, dict, /*train_side=*/false,
                                opts.skip_missing);

  fs::create_directories(opts.out);
  std::ofstream metrics(fs::path(opts.out) / "metrics.log");

  std::unique_ptr<Trainer> trainer;
  if (!opts.checkpoint.empty()) {
    auto resume = load_checkpoint(opts.checkpoint);
    trainer = std::make_unique<Trainer>(cfg, resume);
  } else {
    trainer = std::make_unique<Trainer>(cfg);
  }
  auto sink = file_sink(opts.out);
  trainer->train(train_set, &metrics, &sink,
                 test_set.size() > 0 ? &test_set : nullptr);
  std::cout << "trained " << trainer->step() << " steps; checkpoints in "
            << opts.out << "\n";
  return 0;
}

int cmd_generate(const CommonOpts& opts, const std::string& characters,
                 int style, const std::string& source_dir) {
  if (opts.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  auto ckpt = load_checkpoint(opts.checkpoint);
  NetConfig net = net_config_from(ckpt);
  if (net.style_mode != StyleMode::kDisabled &&
      (style < 1 || style > net.styles))
    throw RangeError("style " + std::to_string(style) + " outside [1, " +
                     std::to_string(net.styles) + "]");

  auto dict = load_dict(opts, net.component_vocab);
  DirectoryGlyphProvider provider(source_dir);

  // Decode the request and validate everything before any file is written.
  std::vector<CharacterCode> chars;
  std::string_view rest = characters;
  while (!rest.empty()) {
    auto decoded = utf8::decode_first(rest);
    if (!decoded) throw DataError("characters string is not valid UTF-8");
    chars.push_back(decoded->first);
    rest.remove_prefix(decoded->second);
  }
  std::vector<std::string> problems;
  for (CharacterCode c : chars) {
    if (!dict.contains(c))
      problems.push_back("U+" + codepoint_hex(c) + ": no dictionary entry");
    else if (!provider.has(c))
      problems.push_back("U+" + codepoint_hex(c) + ": no source glyph");
  }
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return kExitData;
  }

  Generator generator(net);
  unpack_module(ckpt, "generator", *generator);
  generator->eval();
  torch::NoGradGuard no_grad;

  fs::create_directories(opts.out);
  for (CharacterCode c : chars) {
    auto x = render_source_glyph(c, provider).unsqueeze(0);
    auto y_hat = generator->forward(x, {style}, {dict.decompose(c)}).squeeze(0);
    fs::path file = fs::path(opts.out) /
                    (codepoint_hex(c) + "_" + std::to_string(style) + ".png");
    write_png(file, glyph_to_u8(y_hat));
    std::cout << file.string() << "\n";
  }
  return 0;
}

int cmd_evaluate(const CommonOpts& opts) {
  if (opts.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  if (opts.manifest.empty()) throw ConfigError("--test-manifest is required");
  auto ckpt = load_checkpoint(opts.checkpoint);
  NetConfig net = net_config_from(ckpt);
  Corpus corpus(opts.corpus);
  auto dict = load_dict(opts, net.component_vocab);
  auto split = read_split_manifest(opts.manifest);
  auto test_set = build_samples(split, corpus, dict, /*train_side=*/false,
                                opts.skip_missing);

  Generator generator(net);
  unpack_module(ckpt, "generator", *generator);
  auto report = evaluate(generator, test_set);
  std::cout << format_report(report);
  if (!opts.out.empty()) {
    fs::create_directories(fs::path(opts.out));
    std::ofstream tsv(fs::path(opts.out) / "evaluation.tsv");
    tsv << report_to_tsv(report);
  }
  return 0;
}

int cmd_ablate(const CommonOpts& opts, const std::string& matrix_path) {
  TrainConfig cfg = load_config(opts);
  Corpus corpus(opts.corpus);
  auto dict = load_dict(opts, cfg.net.component_vocab);

  // Matrix rows: `<name> <style_mode> <components:0|1>`.
  std::ifstream in(matrix_path);
  if (!in) throw ConfigError("cannot open matrix file: " + matrix_path);
  std::vector<std::pair<std::string, NetConfig>> matrix;
  std::string name, mode;
  int components;
  while (in >> name >> mode >> components) {
    NetConfig net = cfg.net;
    net.style_mode = style_mode_from_string(mode);
    net.components_enabled = components != 0;
    matrix.emplace_back(name, net);
  }
  if (matrix.empty()) throw ConfigError("matrix file has no rows");

  DatasetSplit split;
  if (!opts.manifest.empty())
    split = read_split_manifest(opts.manifest);
  else {
    split.train_chars = corpus.all_chars();
    split.seed = cfg.seed;
  }
  auto train_set = build_samples(split, corpus, dict, true, opts.skip_missing);
  auto test_set = build_samples(split, corpus, dict, false, opts.skip_missing);
  const SampleSet& eval_set = test_set.size() > 0 ? test_set : train_set;

  auto rows = run_ablation(matrix, cfg, train_set, eval_set);
  auto table = format_ablation(rows);
  std::cout << table;
  if (!opts.out.empty()) {
    fs::create_directories(fs::path(opts.out));
    std::ofstream out(fs::path(opts.out) / "ablation.txt");
    out << table;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-style brush-glyph generator toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  int test_count = 1000;
  int style = 1;
  std::string characters, source_dir, matrix_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config, "flat key = value config file");
    cmd->add_option("--seed", opts.seed)->each([&](const std::string&) {
      opts.seed_set = true;
    });
    cmd->add_option("--dictionary", opts.dictionary, "component dictionary file");
    cmd->add_option("--styles-count", opts.styles_count);
    cmd->add_option("--mode", opts.mode, "style mode: onehot|embedding|disabled");
    cmd->add_flag("--skip-missing", opts.skip_missing);
  };

  auto* prepare = app.add_subcommand("prepare", "normalize corpus and write the split");
  add_common(prepare);
  prepare->add_option("--corpus", opts.corpus)->required();
  prepare->add_option("--out", opts.out)->required();
  prepare->add_option("--test-count", test_count);

  auto* train = app.add_subcommand("train", "train a model");
  add_common(train);
  train->add_option("--corpus", opts.corpus)->required();
  train->add_option("--out", opts.out)->required();
  train->add_option("--manifest", opts.manifest, "split manifest from prepare");
  train->add_option("--checkpoint", opts.checkpoint, "resume from checkpoint");

  auto* generate = app.add_subcommand("generate", "generate glyph images");
  add_common(generate);
  generate->add_option("--checkpoint", opts.checkpoint)->required();
  generate->add_option("--characters", characters, "UTF-8 character string")->required();
  generate->add_option("--style", style);
  generate->add_option("--source-glyphs", source_dir, "directory of rendered inputs")->required();
  generate->add_option("--out", opts.out)->required();

  auto* eval = app.add_subcommand("evaluate", "compute MSE/SSIM on the test split");
  add_common(eval);
  eval->add_option("--checkpoint", opts.checkpoint)->required();
  eval->add_option("--corpus", opts.corpus)->required();
  eval->add_option("--test-manifest", opts.manifest)->required();
  eval->add_option("--out", opts.out);

  auto* ablate = app.add_subcommand("ablate", "train and compare mode configurations");
  add_common(ablate);
  ablate->add_option("--corpus", opts.corpus)->required();
  ablate->add_option("--matrix", matrix_path, "rows: name style_mode components")->required();
  ablate->add_option("--manifest", opts.manifest);
  ablate->add_option("--out", opts.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    torch::set_num_threads(1);
    if (prepare->parsed()) return cmd_prepare(opts, test_count);
    if (train->parsed()) return cmd_train(opts);
    if (generate->parsed())
      return cmd_generate(opts, characters, style, source_dir);
    if (eval->parsed()) return cmd_evaluate(opts);
    if (ablate->parsed()) return cmd_ablate(opts, matrix_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: training diverged at " << e.what() << "\n";
    return kExitDivergence;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
