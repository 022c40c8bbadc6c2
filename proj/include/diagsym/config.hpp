#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/hamiltonian.hpp"
#include "diagsym/smoothing.hpp"
#include "diagsym/vmc.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace diagsym {

struct SystemConfig {
  std::string lattice = "chain";
  double scale = 1.0;
  std::vector<std::vector<double>> sites;
  double depth = 0.0;
  double width = 0.1;
  int image_range = 3;
  double interaction = 0.0;
  double shift = 0.0;
  int n_up = 1;
  int n_down = 0;
  bool operator==(const SystemConfig&) const = default;
};

struct GeneratorConfig {
  std::vector<std::vector<double>> rotation;  // rows
  std::vector<double> translation;
  bool operator==(const GeneratorConfig&) const = default;
};

struct GroupConfig {
  std::string builtin;  // empty when generators are given
  std::vector<GeneratorConfig> generators;
  bool operator==(const GroupConfig&) const = default;
};

struct AnsatzConfig {
  int cutoff = 4;
  bool jastrow = false;
  std::string init = "random";  // random | oracle | oracle-perturbed
  std::uint64_t init_seed = 1;
  double init_scale = 0.1;
  double perturbation = 0.2;
  bool operator==(const AnsatzConfig&) const = default;
};

struct RegionConfig {
  std::string builtin;  // empty when center/faces are given
  std::vector<double> center;
  std::vector<std::vector<double>> faces;
  bool operator==(const RegionConfig&) const = default;
};

struct MethodConfig {
  std::string name = "og";  // og | da | ga | gas | sc | pa | pc
  std::size_t k = 1;
  std::string subset = "full";  // full | identity | generators | subgroup:<name> | indices
  std::vector<std::size_t> subset_indices;
  double epsilon = 0.05;
  std::string smoothing = "spline2";
  RegionConfig region;
  bool operator==(const MethodConfig&) const = default;
};

struct SamplerConfig {
  std::size_t walkers = 64;
  int steps = 10;
  int burn_in = 200;
  double step_size = 0.1;
  bool operator==(const SamplerConfig&) const = default;
};

struct TrainingConfig {
  int steps = 100;
  double learning_rate = 0.01;
  int decay_every = 0;
  double decay_factor = 0.5;
  int checkpoint_every = 0;
  bool operator==(const TrainingConfig&) const = default;
};

struct EvaluationConfig {
  std::size_t chains = 32;
  std::size_t samples_per_chain = 200;
  int thin = 5;
  int burn_in = 500;
  bool operator==(const EvaluationConfig&) const = default;
};

struct OracleConfig {
  int cutoff = 16;
  bool operator==(const OracleConfig&) const = default;
};

struct StatsConfig {
  std::size_t replicates = 100;
  std::size_t batch = 64;
  std::vector<std::string> methods{"og", "da", "ga", "gas"};
  bool exact_sampling = false;
  std::optional<double> baseline;
  std::vector<double> epsilons{0.1, 0.05, 0.01};
  bool operator==(const StatsConfig&) const = default;
};

struct ScanConfig {
  int resolution = 101;
  std::vector<std::vector<double>> positions;  // explicit base configuration
  std::vector<std::string> spins;              // "up" / "down", parallel to positions
  std::vector<std::vector<double>> orbit_seeds;  // alternative: union of point-group orbits (spin up)
  std::vector<int> axes;
  bool operator==(const ScanConfig&) const = default;
};

struct ExperimentConfig {
  SystemConfig system;
  GroupConfig group;
  AnsatzConfig ansatz;
  MethodConfig method;
  SamplerConfig sampler;
  TrainingConfig training;
  EvaluationConfig evaluation;
  OracleConfig oracle;
  StatsConfig stats;
  ScanConfig scan;
  std::uint64_t seed = 0;
  std::string output = "run";
  bool operator==(const ExperimentConfig&) const = default;
};

// Unknown keys and wrong types throw ConfigError naming the full key path.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json emit_config(const ExperimentConfig& c);
// YAML (the human-editable form) or JSON, detected from content.
nlohmann::json parse_document(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Cross-field rules; `stage` is one of "oracle", "train", "evaluate", "scan", "gradstats", "probe-smoothing".
void validate_config(const ExperimentConfig& c, const std::string& stage);

// Materialised objects.
Hamiltonian build_hamiltonian(const ExperimentConfig& c);
SpaceGroup build_group(const ExperimentConfig& c);
FundamentalRegion build_region(const ExperimentConfig& c);
SmoothingSpec build_smoothing(const ExperimentConfig& c);
std::vector<std::size_t> build_subset(const ExperimentConfig& c, const SpaceGroup& group);
std::shared_ptr<const PlaneWaveBasis> build_basis(const ExperimentConfig& c);
Ansatz build_initial_ansatz(const ExperimentConfig& c);

}  // namespace diagsym
