#pragma once

#include "diagsym/config.hpp"
#include "diagsym/hamiltonian.hpp"
#include "diagsym/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <vector>

namespace fixtures {

using namespace diagsym;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Hamiltonian free_chain(double length = kTwoPi) {
  Hamiltonian h;
  h.lattice = Lattice::make(LatticeKind::chain, length);
  return h;
}

// One Gaussian well in a chain of length 2 pi; two same-spin electrons fill
// the two lowest (non-degenerate) levels.
inline Hamiltonian well_chain() {
  Hamiltonian h = free_chain();
  h.sites = {Vec::Zero(1)};
  h.depth = 5.0;
  h.width = 1.0;
  return h;
}

// Wells at 0 and 1/2: invariant under reflection and the half translation.
// With one up and one down electron in the nodeless lowest orbital the
// ground state is G-invariant, so group averaging keeps it (the two-up
// state of well_chain is odd under reflection and averages to zero).
inline Hamiltonian twin_well_chain() {
  Hamiltonian h = free_chain();
  h.sites = {Vec::Zero(1), Vec::Constant(1, 0.5)};
  h.depth = 3.0;
  h.width = 0.7;
  return h;
}

inline ExperimentConfig well_config() {
  ExperimentConfig c;
  c.system.lattice = "chain";
  c.system.scale = kTwoPi;
  c.system.sites = {{0.0}};
  c.system.depth = 5.0;
  c.system.width = 1.0;
  c.system.n_up = 2;
  c.group.builtin = "1d-reflection";
  c.ansatz.cutoff = 6;
  c.ansatz.init_seed = 3;
  c.ansatz.init_scale = 0.3;
  c.method.region.builtin = "half-interval";
  c.sampler.walkers = 256;
  c.sampler.step_size = 0.15;
  c.training.steps = 2000;
  c.training.learning_rate = 0.05;
  c.training.decay_every = 500;
  c.oracle.cutoff = 16;
  c.seed = 7;
  return c;
}

// Independent reference: periodic finite differences (sixth order) for
// -1/2 psi'' + V psi on a chain of physical length L, V a sum of periodic
// Gaussian wells written out directly. Returns the `count` lowest levels.
inline std::vector<double> grid_levels_1d(double length, const std::vector<double>& sites, double depth,
                                          double width, int count, int n = 600) {
  const double h = length / n;
  Mat a = Mat::Zero(n, n);
  const double c[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  for (int i = 0; i < n; ++i) {
    for (int o = -3; o <= 3; ++o) a(i, ((i + o) % n + n) % n) += -0.5 * c[std::abs(o)] / (h * h);
    const double x = static_cast<double>(i) / n;
    double v = 0.0;
    for (double r : sites)
      for (int img = -4; img <= 4; ++img) {
        const double dx = length * (x - r + img);
        v -= depth * std::exp(-dx * dx / (2.0 * width * width));
      }
    a(i, i) += v;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + count};
}

inline Configuration config_1d(std::vector<double> xs, std::vector<Spin> spins = {}) {
  Configuration c;
  c.positions = Mat(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) c.positions(static_cast<Eigen::Index>(i), 0) = xs[i];
  c.spins = spins.empty() ? std::vector<Spin>(xs.size(), Spin::up) : spins;
  return c;
}

inline Configuration random_config(const Wavefunction& psi, Rng& rng) {
  Configuration c{Mat(psi.n_electrons(), psi.dim()), psi.spin_layout()};
  for (Eigen::Index i = 0; i < c.positions.size(); ++i) c.positions.data()[i] = uniform01(rng);
  return c;
}

inline Isometry iso(std::initializer_list<std::initializer_list<double>> a, std::initializer_list<double> b) {
  const int d = static_cast<int>(b.size());
  Isometry g{Mat(d, d), Vec(d)};
  int i = 0;
  for (const auto& row : a) {
    int j = 0;
    for (double v : row) g.rotation(i, j++) = v;
    ++i;
  }
  i = 0;
  for (double v : b) g.translation(i++) = v;
  return g;
}

}  // namespace fixtures
