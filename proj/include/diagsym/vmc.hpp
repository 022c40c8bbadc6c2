#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/hamiltonian.hpp"
#include "diagsym/rng.hpp"
#include "diagsym/symmetrize.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace diagsym {

struct SamplerOptions {
  int steps = 10;     // Metropolis sweeps between harvested samples (m)
  int burn_in = 200;  // sweeps before the first sample
  double step_size = 0.1;
};

struct ChainState {
  Configuration config;
  double log_prob = 0.0;  // 2 log|psi|
  Rng rng;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
};

// Uniform random start that is not on a node.
ChainState random_chain(const Wavefunction& psi, std::uint64_t seed, std::size_t chain);
void refresh(const Wavefunction& psi, ChainState& chain);
// One all-electron Gaussian move with periodic wrap.
bool metropolis_step(const Wavefunction& psi, ChainState& chain, double step_size);
void advance(const Wavefunction& psi, ChainState& chain, int steps, double step_size);

// N independent chains, each run burn_in + m steps from a uniform start.
std::vector<Configuration> sample_batch(const Wavefunction& psi, std::size_t n, int m, int burn_in,
                                        double step_size, std::uint64_t seed);

struct SampleSet {
  std::vector<Configuration> samples;  // chain-major
  double acceptance = 0.0;
};
SampleSet sample_inference(const Wavefunction& psi, std::size_t chains, std::size_t per_chain, int thin, int burn_in,
                           double step_size, std::uint64_t seed);

// Exact draws from |psi|^2 for one electron in one dimension (rejection from
// the uniform density with an envelope taken on a fine grid).
class ExactSampler1D {
 public:
  explicit ExactSampler1D(const Wavefunction& psi, int grid = 8192, double margin = 1.25);
  Configuration draw(Rng& rng) const;

 private:
  const Wavefunction* psi_;
  double log_envelope_;
  std::vector<Spin> spins_;
};

Vec grad_estimator_F(const Hamiltonian& h, const Wavefunction& psi, const Configuration& c, double baseline);

// sc trains the smoothed-canonical wavefunction directly.
enum class UpdateMethod { og, da, ga, gas, sc };
std::string to_string(UpdateMethod m);
UpdateMethod update_method_from_string(std::string_view name);

// Everything an update estimator needs besides the seed.
struct UpdateContext {
  Hamiltonian hamiltonian;
  Ansatz base;
  SpaceGroup group;
  std::vector<std::size_t> subset;  // GA subset (element indices); empty means the whole group
  std::size_t batch = 64;           // N
  std::size_t k = 1;
  SamplerOptions sampler;
  bool exact_sampling = false;     // 1D one-electron fixtures only
  std::optional<double> baseline;  // fixed c; otherwise the batch mean of E_L
  std::optional<FundamentalRegion> region;  // sc only
  SmoothingSpec smoothing;
};

struct UpdateEstimate {
  Vec delta;
  double energy = 0.0;  // mean local energy over the samples used
  std::size_t node_resamples = 0;
};

UpdateEstimate update_og(const UpdateContext& ctx, std::uint64_t seed);
UpdateEstimate update_da(const UpdateContext& ctx, std::uint64_t seed);
UpdateEstimate update_ga(const UpdateContext& ctx, std::uint64_t seed);
UpdateEstimate update_gas(const UpdateContext& ctx, std::uint64_t seed, std::uint64_t step = 0);
UpdateEstimate update_sc(const UpdateContext& ctx, std::uint64_t seed);
UpdateEstimate run_update(UpdateMethod method, const UpdateContext& ctx, std::uint64_t seed);

struct TrainOptions {
  UpdateMethod method = UpdateMethod::og;
  int steps = 100;
  std::size_t walkers = 64;  // N
  std::size_t k = 1;
  std::vector<std::size_t> subset;
  SamplerOptions sampler;
  double learning_rate = 0.01;
  int decay_every = 0;  // 0 keeps the rate fixed
  double decay_factor = 0.5;
  int checkpoint_every = 0;
  double divergence_factor = 1e3;
  std::optional<FundamentalRegion> region;  // sc only
  SmoothingSpec smoothing;
  std::uint64_t seed = 0;
};

struct TrainRecord {
  int step = 0;
  double energy = 0.0;
  double stderr_energy = 0.0;
  double variance = 0.0;
  double acceptance = 0.0;
  double learning_rate = 0.0;
  double sample_seconds = 0.0;
  double grad_seconds = 0.0;
};

struct TrainCallbacks {
  std::function<void(const TrainRecord&)> on_step;
  std::function<void(int step, const Ansatz&)> on_checkpoint;
};

struct TrainResult {
  Ansatz final;
  std::vector<TrainRecord> trace;
};

TrainResult train(const Hamiltonian& h, const Ansatz& init, const SpaceGroup& group, const TrainOptions& opt,
                  const TrainCallbacks& callbacks = {});

struct EnergyMetrics {
  double energy = 0.0;
  double stderr_energy = 0.0;
  double variance = 0.0;
  double acceptance = 0.0;
  std::size_t samples = 0;
};

double batch_means_stderr(std::span<const double> xs, int blocks = 32);
EnergyMetrics evaluate_metrics(const Hamiltonian& h, const Wavefunction& psi, std::span<const Configuration> samples,
                               double acceptance = 0.0);

struct RatioVariance {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};
// Sample variance of psi^G / psi over draws from |psi|^2.
RatioVariance var_pa_over_og(const Ansatz& base, std::span<const Isometry> subset,
                             std::span<const Configuration> samples);

}  // namespace diagsym
