#include "support/fixtures.hpp"

#include <doctest.h>

using namespace diagsym;
using namespace fixtures;
using doctest::Approx;

TEST_CASE("free particle spectrum") {
  const SpectrumResult s = diagonalize(free_chain(), 2);
  const std::vector<double> want{0.0, 0.5, 0.5, 2.0, 2.0};
  REQUIRE(s.eigenvalues.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(s.eigenvalues[i] == Approx(want[i]).epsilon(1e-14));
  CHECK(ground_state_energy(s, 2, 0) == Approx(0.5));
  CHECK(ground_state_energy(s, 1, 1) == Approx(0.0));
}

TEST_CASE("constant potential shifts the spectrum") {
  // a well much wider than the cell is flat: only its mean survives
  Hamiltonian h = free_chain();
  h.sites = {Vec::Zero(1)};
  h.depth = 0.01;
  h.width = 1e3;
  const double mean = -0.01 * 1e3 * std::sqrt(kTwoPi) / kTwoPi;
  const SpectrumResult s = diagonalize(h, 3);
  const SpectrumResult f = diagonalize(free_chain(), 3);
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    CHECK(s.eigenvalues[i] == Approx(f.eigenvalues[i] + mean).epsilon(1e-12));
}

TEST_CASE("Gaussian well agrees with an independent grid solver") {
  const Hamiltonian h = well_chain();
  const SpectrumResult s = diagonalize(h, 16, 4);
  CHECK(s.converged);
  const auto ref = grid_levels_1d(kTwoPi, {0.0}, 5.0, 1.0, 4);
  for (int i = 0; i < 4; ++i) CHECK(s.eigenvalues[static_cast<std::size_t>(i)] == Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-8));
  CHECK(ground_state_energy(s, 2, 0) == Approx(ref[0] + ref[1]).epsilon(1e-8));
  CHECK_FALSE(is_degenerate(s, 2, 0));
}

TEST_CASE("Gaussian well levels converge under cutoff doubling") {
  const Hamiltonian h = well_chain();
  const double e16 = diagonalize(h, 16).eigenvalues[0];
  const double e32 = diagonalize(h, 32).eigenvalues[0];
  const double e64 = diagonalize(h, 64).eigenvalues[0];
  CHECK(std::abs(e32 - e16) < 1e-10);
  CHECK(std::abs(e64 - e32) < 1e-10);
  // regression constant for the two-electron fixture, cross-checked above against the grid solver
  CHECK(ground_state_energy(diagonalize(h, 64), 2, 0) == Approx(-6.11555600785).epsilon(1e-11));
}

TEST_CASE("free square lattice spectrum") {
  Hamiltonian h;
  h.lattice = Lattice::make(LatticeKind::square, kTwoPi);
  const SpectrumResult s = diagonalize(h, 2);
  CHECK(s.eigenvalues[0] == Approx(0.0).scale(1.0));
  for (int i = 1; i <= 4; ++i) CHECK(s.eigenvalues[static_cast<std::size_t>(i)] == Approx(0.5));
  CHECK(s.eigenvalues[5] == Approx(1.0));
  CHECK(is_degenerate(s, 2, 0));
}

TEST_CASE("exact ansatz has a constant local energy") {
  const Hamiltonian h = well_chain();
  const SpectrumResult s = diagonalize(h, 16);
  const auto basis = std::make_shared<const PlaneWaveBasis>(h.lattice, 16);
  const Ansatz a = exact_ansatz(s, 2, 0, basis);
  const double e0 = ground_state_energy(s, 2, 0);
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const Configuration c = random_config(a, rng);
    const auto e = a.evaluate(c);
    if (e.is_node() || e.log_abs < -10) continue;
    worst = std::max(worst, std::abs(local_energy(h, c, e) - e0));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("free particle exact ansatz") {
  const SpectrumResult s = diagonalize(free_chain(), 2);
  const Ansatz a = exact_ansatz(s, 1, 0);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) CHECK(std::abs(local_energy(free_chain(), a, random_config(a, rng))) < 1e-12);
  CHECK(is_degenerate(s, 2, 0));  // cos and sin share the level
}

TEST_CASE("exact ansatz needs the oracle functions in its basis") {
  const Hamiltonian h = well_chain();
  const SpectrumResult s = diagonalize(h, 16);
  CHECK_THROWS_AS(exact_ansatz(s, 2, 0, std::make_shared<const PlaneWaveBasis>(h.lattice, 2)), ConfigError);
}

TEST_CASE("oracle refusals") {
  Hamiltonian h = well_chain();
  h.interaction = 0.5;
  CHECK_THROWS_WITH_AS(diagonalize(h, 4), doctest::Contains("oracle requires non-interacting"), ConfigError);
  CHECK_THROWS_AS(diagonalize(well_chain(), 0), ConfigError);
}

TEST_CASE("shift is added once per system") {
  Hamiltonian h = well_chain();
  h.shift = 1.25;
  const SpectrumResult s = diagonalize(h, 16);
  CHECK(ground_state_energy(s, 2, 0) == Approx(-6.11555600785 + 1.25).epsilon(1e-10));
}
