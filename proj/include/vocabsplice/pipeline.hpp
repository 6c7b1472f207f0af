#pragma once

// Subcommand orchestration behind the vocabsplice CLI. Every subcommand
// reads its inputs, writes its artifacts into the output directory and a
// run.json summary (inputs, config hash, outputs, stats). `pipeline` runs
// preprocess -> build-vocab -> analyze -> classify -> club -> select ->
// surgery, producing exactly the files those stages produce one by one.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vocabsplice/adapt.hpp"
#include "vocabsplice/bpe.hpp"
#include "vocabsplice/corpus.hpp"
#include "vocabsplice/embedding.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/io.hpp"
#include "vocabsplice/squad.hpp"
#include "vocabsplice/squad_eval.hpp"
#include "vocabsplice/text.hpp"
#include "vocabsplice/vocab.hpp"

namespace vocabsplice::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct PipelineConfig {
  struct Paths {
    std::string corpus_dir;
    std::string base_vocab;
    std::string label_overrides;
    std::string club_overrides;
    std::string output_dir = "out";
  } paths;
  struct Thresholds {
    double formula_density = 0.15;
    std::uint64_t formula_max_equals = 2;
    std::uint64_t min_prefix_len = 5;
    std::uint64_t min_pair_freq = 2;
  } thresholds;
  struct Sizes {
    std::uint64_t custom_vocab_target = 30000;
    std::uint64_t slot_budget = 429;
    std::uint64_t reference_pages = 2;
  } sizes;
  struct Split {
    double dev_fraction = 26.0 / 181.0;
    std::uint64_t seed = 0;
  } split;
};

inline json to_json(const PipelineConfig& c) {
  return {{"paths",
           {{"corpus_dir", c.paths.corpus_dir},
            {"base_vocab", c.paths.base_vocab},
            {"label_overrides", c.paths.label_overrides},
            {"club_overrides", c.paths.club_overrides},
            {"output_dir", c.paths.output_dir}}},
          {"thresholds",
           {{"formula_density", c.thresholds.formula_density},
            {"formula_max_equals", c.thresholds.formula_max_equals},
            {"min_prefix_len", c.thresholds.min_prefix_len},
            {"min_pair_freq", c.thresholds.min_pair_freq}}},
          {"sizes",
           {{"custom_vocab_target", c.sizes.custom_vocab_target},
            {"slot_budget", c.sizes.slot_budget},
            {"reference_pages", c.sizes.reference_pages}}},
          {"split", {{"dev_fraction", c.split.dev_fraction}, {"seed", c.split.seed}}}};
}

/// Every leaf of the config as a dotted key ("thresholds.min_prefix_len").
inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  const auto defaults = to_json(PipelineConfig{});
  for (const auto& [section, body] : defaults.items()) {
    for (const auto& [leaf, value] : body.items()) keys.push_back(section + "." + leaf);
  }
  return keys;
}

namespace detail {

template <typename T>
void read_leaf(const json& j, const char* section, const char* key, T& out) {
  const auto& s = j.at(section);
  const auto it = s.find(key);
  if (it == s.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("config: ") + section + "." + key + " has the wrong type");
  }
}

inline void check_known_keys(const json& j) {
  const auto defaults = to_json(PipelineConfig{});
  if (!j.is_object()) throw Error("config: top level must be a JSON object");
  for (const auto& [section, body] : j.items()) {
    if (!defaults.contains(section)) throw Error("config: unknown section '" + section + "'");
    if (!body.is_object()) throw Error("config: section '" + section + "' must be an object");
    for (const auto& [leaf, value] : body.items()) {
      if (!defaults[section].contains(leaf)) throw Error("config: unknown key '" + section + "." + leaf + "'");
    }
  }
}

}  // namespace detail

inline void validate_config(const PipelineConfig& c) {
  if (!(c.thresholds.formula_density > 0.0 && c.thresholds.formula_density <= 1.0)) {
    throw Error("config: thresholds.formula_density must lie in (0, 1]");
  }
  if (c.thresholds.formula_max_equals < 1) throw Error("config: thresholds.formula_max_equals must be >= 1");
  if (c.thresholds.min_prefix_len < 3) throw Error("config: thresholds.min_prefix_len must be >= 3");
  if (c.thresholds.min_pair_freq < 1) throw Error("config: thresholds.min_pair_freq must be >= 1");
  if (c.sizes.custom_vocab_target < 1) throw Error("config: sizes.custom_vocab_target must be >= 1");
  if (!(c.split.dev_fraction > 0.0 && c.split.dev_fraction < 1.0)) {
    throw Error("config: split.dev_fraction must lie in (0, 1)");
  }
  if (c.paths.output_dir.empty()) throw Error("config: paths.output_dir must be set");
}

/// Missing sections and keys keep their defaults; unknown ones are errors.
inline PipelineConfig config_from_json(json j) {
  detail::check_known_keys(j);
  auto full = to_json(PipelineConfig{});
  for (const auto& [section, body] : j.items()) {
    for (const auto& [leaf, value] : body.items()) full[section][leaf] = value;
  }
  PipelineConfig c;
  detail::read_leaf(full, "paths", "corpus_dir", c.paths.corpus_dir);
  detail::read_leaf(full, "paths", "base_vocab", c.paths.base_vocab);
  detail::read_leaf(full, "paths", "label_overrides", c.paths.label_overrides);
  detail::read_leaf(full, "paths", "club_overrides", c.paths.club_overrides);
  detail::read_leaf(full, "paths", "output_dir", c.paths.output_dir);
  detail::read_leaf(full, "thresholds", "formula_density", c.thresholds.formula_density);
  detail::read_leaf(full, "thresholds", "formula_max_equals", c.thresholds.formula_max_equals);
  detail::read_leaf(full, "thresholds", "min_prefix_len", c.thresholds.min_prefix_len);
  detail::read_leaf(full, "thresholds", "min_pair_freq", c.thresholds.min_pair_freq);
  detail::read_leaf(full, "sizes", "custom_vocab_target", c.sizes.custom_vocab_target);
  detail::read_leaf(full, "sizes", "slot_budget", c.sizes.slot_budget);
  detail::read_leaf(full, "sizes", "reference_pages", c.sizes.reference_pages);
  detail::read_leaf(full, "split", "dev_fraction", c.split.dev_fraction);
  detail::read_leaf(full, "split", "seed", c.split.seed);
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  try {
    return config_from_json(json::parse(io::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
}

/// Sets one dotted key from its command-line text, converting to the type
/// the key has in the defaults.
inline void apply_override(PipelineConfig& c, std::string_view dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  const auto defaults = to_json(PipelineConfig{});
  if (dot == std::string_view::npos) throw Error("config: '" + std::string(dotted) + "' is not a dotted key");
  const std::string section(dotted.substr(0, dot));
  const std::string leaf(dotted.substr(dot + 1));
  if (!defaults.contains(section) || !defaults[section].contains(leaf)) {
    throw Error("config: unknown key '" + std::string(dotted) + "'");
  }
  const auto& kind = defaults[section][leaf];
  json patch = json::object();
  try {
    if (kind.is_string()) {
      patch[section][leaf] = value;
    } else if (kind.is_number_unsigned()) {
      std::size_t used = 0;
      const auto v = std::stoull(value, &used);
      if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
      patch[section][leaf] = v;
    } else {
      std::size_t used = 0;
      const auto v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      patch[section][leaf] = v;
    }
  } catch (const std::logic_error&) {
    throw Error("config: '" + value + "' is not a valid value for " + std::string(dotted));
  }
  auto merged = to_json(c);
  merged[section][leaf] = patch[section][leaf];
  c = config_from_json(merged);
}

inline std::string config_hash(const PipelineConfig& c) { return text::hex64(text::fnv1a64(to_json(c).dump())); }

/// Per-invocation file arguments that are not part of the config.
struct SubcommandArgs {
  std::string input;
  std::string answers;
  std::string predictions;
  std::string embeddings;
  std::string nuke_vocab;
  std::string title = "dataset";
};

/// Names of the files each stage writes inside the output directory.
namespace files {
inline constexpr const char* corpus = "corpus.txt";
inline constexpr const char* cleaning_stats = "cleaning_stats.json";
inline constexpr const char* custom_vocab_txt = "custom_vocab.txt";
inline constexpr const char* custom_vocab_tsv = "custom_vocab.tsv";
inline constexpr const char* fragmentation = "fragmentation.csv";
inline constexpr const char* overlap = "overlap.json";
inline constexpr const char* classified = "classified.csv";
inline constexpr const char* clubs = "clubs.tsv";
inline constexpr const char* selected = "selected.txt";
inline constexpr const char* nuke_vocab = "nuke_vocab.txt";
inline constexpr const char* embeddings = "embeddings.txt";
inline constexpr const char* dataset = "dataset.json";
inline constexpr const char* rejections = "rejections.json";
inline constexpr const char* validation = "validation.json";
inline constexpr const char* train = "train.json";
inline constexpr const char* dev = "dev.json";
inline constexpr const char* dev_merged = "dev_merged.json";
inline constexpr const char* merge_rejections = "merge_rejections.json";
inline constexpr const char* eval = "eval.json";
inline constexpr const char* run = "run.json";
}  // namespace files

inline json to_json(const corpus::CleaningStats& s) {
  return {{"lines_in", s.lines_in},
          {"lines_dropped_non_ascii", s.lines_dropped_non_ascii},
          {"lines_dropped_formula", s.lines_dropped_formula},
          {"sentences_dropped_formula", s.sentences_dropped_formula},
          {"citations_removed", s.citations_removed},
          {"pages_dropped", s.pages_dropped},
          {"documents", s.documents},
          {"documents_empty", s.documents_empty},
          {"warnings", s.warnings}};
}

class Runner {
 public:
  Runner(PipelineConfig config, SubcommandArgs args) : config_(std::move(config)), args_(std::move(args)) {
    validate_config(config_);
    out_ = config_.paths.output_dir;
  }

  static const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{
        "preprocess", "build-vocab", "analyze",    "classify",   "club",      "select",
        "surgery",    "embed-surgery", "qa-convert", "qa-validate", "qa-split", "qa-merge-answers",
        "qa-eval",    "pipeline"};
    return names;
  }

  /// Runs one subcommand and writes run.json. Throws Error on any failure.
  json run(const std::string& name) {
    json summary;
    if (name == "pipeline") {
      summary = {{"subcommand", name}, {"config_hash", config_hash(config_)}, {"config", to_json(config_)}};
      json stages = json::array();
      for (const char* stage : {"preprocess", "build-vocab", "analyze", "classify", "club", "select", "surgery"}) {
        stages.push_back(run_stage(stage));
      }
      summary["stages"] = std::move(stages);
    } else {
      summary = run_stage(name);
      summary["config"] = to_json(config_);
    }
    io::write_file(out_ / files::run, summary.dump(2) + "\n");
    return summary;
  }

 private:
  struct Stage {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    json stats = json::object();
  };

  json run_stage(const std::string& name) {
    static const std::map<std::string, void (Runner::*)(Stage&)> table{
        {"preprocess", &Runner::preprocess},       {"build-vocab", &Runner::build_vocab},
        {"analyze", &Runner::analyze},             {"classify", &Runner::classify},
        {"club", &Runner::club},                   {"select", &Runner::select},
        {"surgery", &Runner::surgery},             {"embed-surgery", &Runner::embed_surgery},
        {"qa-convert", &Runner::qa_convert},       {"qa-validate", &Runner::qa_validate},
        {"qa-split", &Runner::qa_split},           {"qa-merge-answers", &Runner::qa_merge_answers},
        {"qa-eval", &Runner::qa_eval}};
    const auto it = table.find(name);
    if (it == table.end()) throw Error("unknown subcommand '" + name + "'");
    Stage stage;
    (this->*(it->second))(stage);
    return {{"subcommand", name},
            {"config_hash", config_hash(config_)},
            {"inputs", stage.inputs},
            {"outputs", stage.outputs},
            {"stats", stage.stats}};
  }

  // ---- helpers ----

  fs::path require(const std::string& path, const char* what, Stage& stage) const {
    if (path.empty()) throw Error(std::string(what) + " is not set");
    if (!fs::exists(path)) throw Error(std::string(what) + " not found: " + path);
    stage.inputs.push_back(path);
    return path;
  }

  fs::path require_out(const char* name, Stage& stage) const {
    return require((out_ / name).string(), name, stage);
  }

  fs::path input_or(const std::string& explicit_path, const char* default_name, const char* what,
                    Stage& stage) const {
    if (!explicit_path.empty()) return require(explicit_path, what, stage);
    return require_out(default_name, stage);
  }

  void write(const char* name, std::string_view bytes, Stage& stage) const {
    io::write_file(out_ / name, bytes);
    stage.outputs.push_back((out_ / name).string());
  }

  std::string read(const fs::path& p) const { return io::read_file(p); }

  const Vocab& base_vocab(Stage& stage) {
    if (!base_) base_ = load_vocab_file(require(config_.paths.base_vocab, "paths.base_vocab", stage));
    else stage.inputs.push_back(config_.paths.base_vocab);
    return *base_;
  }

  std::vector<corpus::Document> corpus_documents(Stage& stage) const {
    const auto parsed = corpus::parse_pretrain_corpus(read(require_out(files::corpus, stage)));
    std::vector<corpus::Document> docs;
    for (std::size_t i = 0; i < parsed.size(); ++i) docs.push_back({std::to_string(i), parsed[i]});
    return docs;
  }

  // ---- corpus / vocabulary stages ----

  void preprocess(Stage& stage) {
    const auto raws = corpus::load_corpus_dir(require(config_.paths.corpus_dir, "paths.corpus_dir", stage));
    corpus::CleaningConfig cc;
    cc.formula_density = config_.thresholds.formula_density;
    cc.formula_max_equals = config_.thresholds.formula_max_equals;
    cc.reference_pages = config_.sizes.reference_pages;
    const auto result = corpus::preprocess_corpus(raws, cc);
    write(files::corpus, corpus::format_pretrain_corpus(result.documents), stage);
    const auto stats = to_json(result.stats);
    write(files::cleaning_stats, stats.dump(2) + "\n", stage);
    stage.stats = stats;
  }

  void build_vocab(Stage& stage) {
    const auto docs = corpus_documents(stage);
    BpeOptions opts;
    opts.target_size = config_.sizes.custom_vocab_target;
    opts.min_pair_freq = config_.thresholds.min_pair_freq;
    const auto vocab = train_bpe(docs, opts);
    write(files::custom_vocab_txt, format_custom_vocab_txt(vocab), stage);
    write(files::custom_vocab_tsv, format_custom_vocab_tsv(vocab), stage);
    stage.stats = {{"custom_vocab_size", vocab.size()}, {"target_size", opts.target_size}};
  }

  void analyze(Stage& stage) {
    const auto custom = parse_custom_vocab_tsv(read(require_out(files::custom_vocab_tsv, stage)));
    const auto report = fragmentation_report(custom, base_vocab(stage));
    write(files::fragmentation, format_fragmentation_csv(report), stage);
    std::size_t whole = 0;
    for (const auto& r : report) whole += r.is_whole ? 1 : 0;
    json overlap = {{"records", report.size()},
                    {"whole", whole},
                    {"fragmented", report.size() - whole},
                    {"overlap", report.empty() ? 0.0 : overlap_stat(report)}};
    write(files::overlap, overlap.dump(2) + "\n", stage);
    stage.stats = overlap;
  }

  void classify(Stage& stage) {
    auto report = parse_fragmentation_csv(read(require_out(files::fragmentation, stage)));
    LabelOverrides overrides;
    if (!config_.paths.label_overrides.empty()) {
      overrides = parse_label_overrides(read(require(config_.paths.label_overrides, "paths.label_overrides", stage)));
      // Overrides for words this corpus never produced are expected when one
      // curated file serves several corpora; only the applicable ones are used.
      std::set<std::string> words;
      for (const auto& r : report) words.insert(r.word);
      std::size_t ignored = 0;
      for (auto it = overrides.begin(); it != overrides.end();) {
        if (words.contains(it->first)) {
          ++it;
        } else {
          it = overrides.erase(it);
          ++ignored;
        }
      }
      stage.stats["overrides_ignored"] = ignored;
    }
    report = classify_words(std::move(report), overrides);
    write(files::classified, format_fragmentation_csv(report), stage);
    std::size_t good = 0;
    std::size_t bad = 0;
    for (const auto& r : report) {
      good += r.classification == Classification::good ? 1 : 0;
      bad += r.classification == Classification::bad ? 1 : 0;
    }
    stage.stats["good"] = good;
    stage.stats["bad"] = bad;
    stage.stats["overrides_applied"] = overrides.size();
  }

  void club(Stage& stage) {
    const auto report = parse_fragmentation_csv(read(require_out(files::classified, stage)));
    std::set<std::string> bad;
    for (const auto& r : report) {
      if (r.classification == Classification::bad) bad.insert(r.word);
    }
    std::vector<ClubOverride> overrides;
    if (!config_.paths.club_overrides.empty()) {
      overrides = parse_club_overrides(read(require(config_.paths.club_overrides, "paths.club_overrides", stage)));
    }
    const auto groups = club_roots(bad, config_.thresholds.min_prefix_len, overrides);
    write(files::clubs, format_root_groups(groups), stage);
    stage.stats = {{"bad_words", bad.size()}, {"groups", groups.size()}};
  }

  void select(Stage& stage) {
    const auto groups = parse_root_groups(read(require_out(files::clubs, stage)));
    const auto freqs = word_frequencies(corpus_documents(stage));
    const auto chosen = select_candidates(groups, freqs, config_.sizes.slot_budget, base_vocab(stage));
    std::string body;
    for (const auto& w : chosen) body += w + '\n';
    write(files::selected, body, stage);
    stage.stats = {{"selected", chosen.size()}, {"slot_budget", config_.sizes.slot_budget}};
  }

  void surgery(Stage& stage) {
    const auto& base = base_vocab(stage);
    const auto sel_path = input_or(args_.input, files::selected, "--input", stage);
    std::vector<std::string> selected;
    for (auto& line : text::split(read(sel_path), '\n')) {
      if (!line.empty()) selected.push_back(std::move(line));
    }
    const auto nuke = apply_vocab_surgery(base, selected);
    write(files::nuke_vocab, format_vocab(nuke), stage);
    stage.stats = {{"replaced", selected.size()},
                   {"unused_slots", base.unused_slots().size()},
                   {"vocab_size", nuke.size()}};
  }

  void embed_surgery(Stage& stage) {
    const auto& base = base_vocab(stage);
    const auto nuke = load_vocab_file(input_or(args_.nuke_vocab, files::nuke_vocab, "--nuke-vocab", stage));
    const auto emb = parse_embeddings(read(require(args_.embeddings, "--embeddings", stage)));
    const auto out = embedding_surgery(emb, base, nuke);
    write(files::embeddings, format_embeddings(out), stage);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < base.size(); ++i) changed += base.tokens()[i] != nuke.tokens()[i] ? 1 : 0;
    stage.stats = {{"rows", out.rows()}, {"dim", out.dim()}, {"replaced_rows", changed}};
  }

  // ---- QA stages ----

  void qa_convert(Stage& stage) {
    const auto rows = squad::parse_qa_table(read(require(args_.input, "--input", stage)));
    const auto conv = squad::from_table(rows, args_.title);
    write(files::dataset, squad::serialize(conv.dataset), stage);
    write(files::rejections, squad::to_json(conv.rejections).dump(2) + "\n", stage);
    stage.stats = {{"rows", rows.size()},
                   {"paragraphs", conv.dataset.paragraph_count()},
                   {"questions", conv.dataset.question_count()},
                   {"rejected", conv.rejections.size()}};
  }

  void qa_validate(Stage& stage) {
    const auto ds = squad::parse(read(input_or(args_.input, files::dataset, "--input", stage)));
    const auto report = squad::validate(ds);
    json body = {{"errors", squad::to_json(report.errors)}, {"warnings", squad::to_json(report.warnings)}};
    write(files::validation, body.dump(2) + "\n", stage);
    stage.stats = {{"errors", report.errors.size()}, {"warnings", report.warnings.size()}};
  }

  void qa_split(Stage& stage) {
    const auto ds = squad::parse(read(input_or(args_.input, files::dataset, "--input", stage)));
    const auto parts = squad::split(ds, config_.split.dev_fraction, config_.split.seed);
    write(files::train, squad::serialize(parts.train), stage);
    write(files::dev, squad::serialize(parts.dev), stage);
    stage.stats = {{"train_paragraphs", parts.train.paragraph_count()},
                   {"train_questions", parts.train.question_count()},
                   {"dev_paragraphs", parts.dev.paragraph_count()},
                   {"dev_questions", parts.dev.question_count()},
                   {"seed", config_.split.seed}};
  }

  void qa_merge_answers(Stage& stage) {
    auto dev = squad::parse(read(input_or(args_.input, files::dev, "--input", stage)));
    const auto extras = squad::parse_extra_answers(read(require(args_.answers, "--answers", stage)));
    const auto merged = squad::merge_dev_answers(std::move(dev), extras);
    write(files::dev_merged, squad::serialize(merged.dataset), stage);
    write(files::merge_rejections, squad::to_json(merged.rejections).dump(2) + "\n", stage);
    stage.stats = {{"extra_answers", extras.size()},
                   {"merged", extras.size() - merged.rejections.size()},
                   {"rejected", merged.rejections.size()}};
  }

  void qa_eval(Stage& stage) {
    const auto ds = squad::parse(read(input_or(args_.input, files::dataset, "--input", stage)));
    const auto preds = squad::parse_predictions(read(require(args_.predictions, "--predictions", stage)));
    const auto report = squad::evaluate(ds, preds);
    const auto body = squad::to_json(report);
    write(files::eval, body.dump(2) + "\n", stage);
    stage.stats = body;
  }

  PipelineConfig config_;
  SubcommandArgs args_;
  fs::path out_;
  std::optional<Vocab> base_;
};

}  // namespace vocabsplice::pipeline
