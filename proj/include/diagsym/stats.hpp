#pragma once

#include "diagsym/smoothing.hpp"
#include "diagsym/vmc.hpp"

#include <boost/rational.hpp>

#include <span>
#include <vector>

namespace diagsym {

// Normalised update variance (1/sqrt q) * lambda_max(Cov), with the diagonal-max
// variant alongside and a bootstrap standard error for both.
struct UpdateStats {
  UpdateMethod method = UpdateMethod::og;
  std::size_t replicates = 0;
  Vec mean;
  Vec variance;
  Mat covariance;
  double norm = 0.0;
  double norm_stderr = 0.0;
  double diag_max_norm = 0.0;
  double diag_max_stderr = 0.0;
  bool reliable = false;  // at least 50 replicates
};

std::vector<Vec> update_replicates(UpdateMethod method, const UpdateContext& ctx, std::size_t replicates,
                                   std::uint64_t seed);
UpdateStats summarize_updates(UpdateMethod method, const std::vector<Vec>& reps, std::uint64_t seed,
                              int bootstrap = 200);
UpdateStats update_distribution(UpdateMethod method, const UpdateContext& ctx, std::size_t replicates,
                                std::uint64_t seed);

Mat sample_covariance(const std::vector<Vec>& xs);

// Invariant-case checks on the continuous fixture (exact sampling, fixed baseline).
struct Prop41Report {
  std::size_t replicates = 0;
  std::size_t batch = 0, k = 0;
  Vec mean_diff, mean_sigma;
  Vec excess, predicted, excess_sigma;  // diagonal entries
  Mat excess_matrix;
  double min_eigenvalue = 0.0;
  double min_eigenvalue_sigma = 0.0;
  bool mean_ok = false, excess_ok = false, eigen_ok = false;
  bool ok() const { return mean_ok && excess_ok && eigen_ok; }
};

// Verifies |psi(gx)|^2 = |psi(x)|^2 at random points; throws ConfigError otherwise.
void require_invariant_density(const Wavefunction& psi, const SpaceGroup& group, std::uint64_t seed,
                               int points = 200, double tol = 1e-9);
// Var_X(mean_g F(gX)) estimated from `samples` exact draws.
Mat conditional_mean_covariance(const UpdateContext& ctx, std::size_t samples, std::uint64_t seed,
                                std::vector<Vec>* per_sample = nullptr);
Prop41Report prop41_check(const UpdateContext& ctx, std::size_t replicates, std::uint64_t seed,
                          std::size_t nested_samples = 4000);

struct Lemma42Report {
  std::size_t replicates = 0;
  Vec scaled_replicate_variance;  // (N/k) Var[delta_GA]
  Vec single_draw_variance;       // Var[F at psi^G]
  Vec sigma;
  bool ok = false;
};
Lemma42Report lemma42_check(const UpdateContext& ctx, std::size_t replicates, std::uint64_t seed,
                            std::size_t single_draws = 20000);

// Exhaustive finite toy: points with probabilities, a group acting by
// permutations, and a scalar F. Everything exact.
using Rational = boost::rational<long long>;
struct DiscreteToy {
  std::vector<Rational> probability;
  std::vector<std::vector<std::size_t>> action;  // action[g][x]
  std::vector<Rational> f;
};
struct DiscreteProp41 {
  Rational mean_og, mean_da;
  Rational var_og, var_da;
  Rational excess;
  Rational conditional_variance;  // Var_X(E[F|X])
  Rational predicted;             // (k-1)/N * conditional_variance
};
DiscreteProp41 discrete_prop41(const DiscreteToy& toy, int batch, int k);
DiscreteToy two_point_toy();
DiscreteToy two_orbit_toy();

// Skewed synthetic fixture: X uniform on the q-torus, G = translations by
// j/order along the diagonal, F_l(X) = 1[X_l < p].
struct SyntheticFixture {
  std::size_t q = 4;
  std::size_t order = 4;
  double p = 0.1;
};
std::vector<Vec> synthetic_replicates(UpdateMethod method, const SyntheticFixture& fx, std::size_t batch,
                                      std::size_t k, std::size_t replicates, std::uint64_t seed);

double normal_cdf(double x);
// KS distance between the empirical law of xs and N(mean, sd^2) fitted to xs.
double ks_fitted_normal(std::span<const double> xs);
// KS distance between the empirical law of xs and a reference CDF.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct CltPoint {
  std::size_t batch = 0;
  std::vector<double> ks;
  std::vector<double> ks_sigma;
  double max_ks = 0.0;
  double max_ks_sigma = 0.0;
  double skewness = 0.0;  // mean |standardised third moment| over coordinates
};
struct CltReport {
  UpdateMethod method = UpdateMethod::og;
  std::size_t replicates = 0;
  std::vector<CltPoint> points;
  bool monotone = false;      // each step down within 3 bootstrap sigma
  bool strict_first_last = false;
};
// The statistic for the coordinate of maximum deviation, against a
// max-of-Gaussians reference with the fitted covariance.
double max_coordinate_ks(const std::vector<Vec>& reps, std::uint64_t seed, std::size_t reference_draws = 20000);
CltPoint clt_point(const std::vector<Vec>& reps, std::uint64_t seed, int bootstrap = 200);
CltReport clt_check(UpdateMethod method, const SyntheticFixture& fx, std::span<const std::size_t> batches,
                    std::size_t k, std::size_t replicates, std::uint64_t seed);

struct BlowupRow {
  double epsilon = 0.0;
  SmoothingKind kind = SmoothingKind::spline2;
  double max_first = 0.0;
  double max_second = 0.0;
  double energy_deviation = 0.0;  // max |E_L(SC) - E_L(base at the canonical image)| along the scan
};
struct BlowupFixture {
  Hamiltonian hamiltonian;
  Ansatz base;
  SpaceGroup group;
  FundamentalRegion region;
  std::vector<double> scan_centres;  // 1D points on region boundaries
  double scan_halfwidth = 0.1;
  int scan_points = 1000;
};
std::vector<BlowupRow> blowup_probe(std::span<const double> epsilons, SmoothingKind kind,
                                    const BlowupFixture* fixture = nullptr, int grid = 10000);

}  // namespace diagsym
