#pragma once

#include "diagsym/config.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

namespace diagsym {

struct RunOptions {
  std::filesystem::path out;                        // empty: config.output
  std::optional<std::filesystem::path> checkpoint;  // .bin, .json or a run directory
  bool quiet = false;
};

// Each stage validates the config, writes its artifacts under the run directory
// and returns the JSON report it printed / stored.
nlohmann::json run_oracle(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_train(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_evaluate(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_scan(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_gradstats(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_probe_smoothing(const ExperimentConfig& c, const RunOptions& o);
nlohmann::json run_stage(const std::string& stage, const ExperimentConfig& c, const RunOptions& o);

// step_<n>.bin holds the raw parameter vector, step_<n>.json its shape and provenance.
void save_checkpoint(const std::filesystem::path& dir, int step, const Ansatz& a, const ExperimentConfig& c);
// The .bin file a checkpoint argument refers to.
std::filesystem::path resolve_checkpoint(const std::filesystem::path& path);
// Accepts either file of a pair or a run directory (latest step wins).
Ansatz load_checkpoint(const std::filesystem::path& path, const ExperimentConfig& c);

// 0 ok, 2 config error, 3 numerical divergence, 4 incompatible checkpoint, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace diagsym
