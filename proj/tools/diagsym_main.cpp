#include "diagsym/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

int main(int argc, char** argv) {
  CLI::App app{"diagsym: diagonal symmetrization experiments on toy periodic systems"};
  app.require_subcommand(1, 1);

  std::string config_path, checkpoint, out, method;
  std::uint64_t seed = 0;
  bool quiet = false;

  const std::pair<const char*, const char*> stages[] = {
      {"oracle", "exact spectrum in a plane-wave basis"},
      {"train", "VMC training with the configured update method"},
      {"evaluate", "energy and variance of a checkpoint under an inference method"},
      {"scan", "log|psi|^2 grid over one electron and its symmetry error"},
      {"gradstats", "replicate statistics of the stochastic gradient per method"},
      {"probe-smoothing", "local-energy blow-up near the region boundary"},
  };
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (YAML or JSON)")->required();
    sub->add_option("--checkpoint", checkpoint, "checkpoint file or run directory");
    sub->add_option("--out", out, "run directory (defaults to the config's output)");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--method", method, "method override");
    sub->add_flag("--quiet", quiet, "suppress stdout reports");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string stage = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  try {
    diagsym::ExperimentConfig cfg = diagsym::load_config(config_path);
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--method")) cfg.method.name = method;
    diagsym::RunOptions opts;
    opts.out = out;
    if (!checkpoint.empty()) opts.checkpoint = checkpoint;
    opts.quiet = quiet;
    diagsym::run_stage(stage, cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return diagsym::exit_code_for(e);
  }
  return 0;
}
