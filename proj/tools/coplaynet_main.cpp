// coplaynet: batch pipeline for co-play performance networks.
//
//   synth -> ingest -> rate -> network -> train -> eval -> report
//
// Every stage reads the previous stage's artifacts from the output directory
// and is independently rerunnable from its manifest.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coplaynet/pipeline.hpp"
#include "coplaynet/types.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDataError = 2;
constexpr int kExitNumericError = 3;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;  // section.key=value
};

coplaynet::pipeline::Config load_config(const GlobalArgs& args) {
  using coplaynet::pipeline::Config;
  Config cfg;
  if (!args.config_path.empty()) cfg = Config::from_file(args.config_path);
  if (args.seed_set) cfg.set("pipeline.seed", std::to_string(args.seed));
  if (!args.out_dir.empty()) cfg.set("pipeline.out", args.out_dir);
  if (!args.format.empty()) cfg.set("pipeline.format", args.format);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw coplaynet::DataError("--set expects section.key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-play performance network pipeline"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "pipeline configuration file");
  app.add_option("--seed", args.seed, "top-level seed (mandatory)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  app.add_option("--out", args.out_dir, "output directory (default: out)");
  app.add_option("--format", args.format, "match log format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  app.add_option("--set", args.overrides,
                 "override a config key, e.g. --set models.epochs=50");

  using StageFn = void (*)(const coplaynet::pipeline::Config&);
  struct Stage {
    const char* name;
    const char* help;
    StageFn fn;
  };
  const Stage stages[] = {
      {"synth", "generate a synthetic match log or planted network",
       &coplaynet::pipeline::run_synth},
      {"ingest", "parse, validate and filter a match log",
       &coplaynet::pipeline::run_ingest},
      {"rate", "run the skill-rating forward pass",
       &coplaynet::pipeline::run_rate},
      {"network", "build SPN/LPN, threshold and extract the LCC",
       &coplaynet::pipeline::run_network},
      {"train", "split edges and train the link-weight predictors",
       &coplaynet::pipeline::run_train},
      {"eval", "sample subnetworks and score all models",
       &coplaynet::pipeline::run_eval},
      {"report", "emit timeline, rank-agreement and gain reports",
       &coplaynet::pipeline::run_report},
  };

  StageFn selected = nullptr;
  for (const auto& stage : stages) {
    CLI::App* sub = app.add_subcommand(stage.name, stage.help);
    sub->fallthrough();  // global flags remain valid after the subcommand
    sub->callback([&selected, &stage]() { selected = stage.fn; });
  }

  // Convenience flags mapped onto their config keys.
  app.get_subcommand("synth")->add_option_function<std::string>(
      "--mode",
      [&args](const std::string& v) {
        args.overrides.push_back("synth.mode=" + v);
      },
      "log or planted");
  app.get_subcommand("ingest")->add_option_function<std::string>(
      "--input",
      [&args](const std::string& v) {
        args.overrides.push_back("ingest.input=" + v);
      },
      "match log path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    const auto cfg = load_config(args);
    selected(cfg);
    return 0;
  } catch (const coplaynet::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const coplaynet::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}
