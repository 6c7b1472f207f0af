#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/pipeline.hpp"

namespace vp = vocabsplice::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"Domain vocabulary splicing and SQuAD dataset tooling"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Shorthand for --split.seed");
  app.add_option("--out", out_dir, "Shorthand for --paths.output_dir");

  std::map<std::string, std::string> overrides;
  for (const auto& key : vp::config_keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "Override config value " + key);
  }

  vp::SubcommandArgs args;
  for (const auto& name : vp::Runner::subcommands()) {
    auto* sub = app.add_subcommand(name);
    if (name == "qa-convert") {
      sub->add_option("--input", args.input, "CSV with header paragraph,question,answer")->required();
      sub->add_option("--title", args.title, "Article title for the generated dataset");
    } else if (name == "qa-validate" || name == "qa-split" || name == "qa-eval") {
      sub->add_option("--input", args.input, "SQuAD JSON (default: <out>/dataset.json)");
    } else if (name == "qa-merge-answers") {
      sub->add_option("--input", args.input, "Dev SQuAD JSON (default: <out>/dev.json)");
      sub->add_option("--answers", args.answers, "CSV with header id,answer")->required();
    } else if (name == "surgery") {
      sub->add_option("--input", args.input, "Selected words, one per line (default: <out>/selected.txt)");
    } else if (name == "embed-surgery") {
      sub->add_option("--embeddings", args.embeddings, "Embedding matrix text file")->required();
      sub->add_option("--nuke-vocab", args.nuke_vocab, "Spliced vocab (default: <out>/nuke_vocab.txt)");
    }
    if (name == "qa-eval") {
      sub->add_option("--predictions", args.predictions, "JSON object id -> answer")->required();
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    vp::PipelineConfig config;
    if (!config_path.empty()) config = vp::load_config(config_path);
    for (const auto& [key, value] : overrides) vp::apply_override(config, key, value);
    if (seed) config.split.seed = *seed;
    if (!out_dir.empty()) config.paths.output_dir = out_dir;

    const auto name = app.get_subcommands().front()->get_name();
    vp::Runner runner(config, args);
    const auto summary = runner.run(name);
    std::cout << summary.dump(2) << "\n";
  } catch (const vocabsplice::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
