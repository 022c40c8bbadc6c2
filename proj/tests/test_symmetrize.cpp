#include "support/finite_diff.hpp"
#include "support/fixtures.hpp"

#include "diagsym/symmetrize.hpp"

#include <doctest.h>

#include <map>

using namespace diagsym;
using namespace fixtures;
using doctest::Approx;

namespace {

Ansatz random_2d(int nu, int nd, std::uint64_t seed) {
  const auto b = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::square, 1.0), 2);
  return Ansatz::random(b, nu, nd, true, seed, 0.5);
}

bool same_up_to_permutation(const Configuration& a, const Configuration& b) {
  std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
  for (int i = 0; i < a.size(); ++i) {
    bool found = false;
    for (int j = 0; j < b.size() && !found; ++j) {
      if (used[static_cast<std::size_t>(j)] || a.spins[static_cast<std::size_t>(i)] != b.spins[static_cast<std::size_t>(j)]) continue;
      if (torus_distance(a.positions.row(i).transpose(), b.positions.row(j).transpose()) < 1e-12) {
        used[static_cast<std::size_t>(j)] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("group average over the identity is the base") {
  const Ansatz a = random_2d(2, 1, 3);
  const GroupAveraged ga(a, {Isometry::identity(2)});
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Configuration c = random_config(a, rng);
    const auto x = a.evaluate(c), y = ga.evaluate(c);
    CHECK(x.log_abs == Approx(y.log_abs).epsilon(1e-14));
    CHECK(x.sign == y.sign);
    CHECK((x.grad_params - y.grad_params).norm() <= 1e-12 * (1 + x.grad_params.norm()));
    CHECK(x.laplacian_over_psi == Approx(y.laplacian_over_psi).epsilon(1e-12));
  }
}

TEST_CASE("group average is invariant and antisymmetric") {
  const Ansatz a = random_2d(2, 1, 4);
  const SpaceGroup g = builtin_group("p4mm-centred");
  const GroupAveraged ga(a, g.elements());
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Configuration c = random_config(a, rng);
    const auto e = ga.evaluate(c, EvalLevel::value);
    for (const auto& h : g.elements()) {
      const auto eh = ga.evaluate(apply_diagonal(h, c), EvalLevel::value);
      CHECK(eh.log_abs == Approx(e.log_abs).epsilon(1e-10));
      CHECK(eh.sign == e.sign);
    }
    Configuration swapped = c;
    swapped.positions.row(0).swap(swapped.positions.row(1));
    const auto es = ga.evaluate(swapped, EvalLevel::value);
    CHECK(es.log_abs == Approx(e.log_abs).epsilon(1e-12));
    CHECK(es.sign == -e.sign);
  }
}

TEST_CASE("group average derivatives match finite differences") {
  const Ansatz a = random_2d(2, 0, 5);
  const SpaceGroup g = builtin_group("p4mm");
  const GroupAveraged ga(a, g.elements());
  Rng rng(3);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const Configuration c = random_config(a, rng);
    const auto e = ga.evaluate(c);
    if (e.is_node() || e.log_abs < -6) continue;
    const FdResult fd = finite_difference(ga, c);
    for (Eigen::Index i = 0; i < fd.grad_log.size(); ++i)
      CHECK(close_rel(e.grad_x.data()[i], fd.grad_log.data()[i], 1e-6));
    CHECK(close_rel(e.laplacian_over_psi, fd.laplacian_over_psi, 1e-6, 10.0));
    const Vec gp = param_gradient_fd([&](const Vec& th) { return GroupAveraged(a.with_params(th), g.elements()); },
                                     a.params(), c);
    CHECK((e.grad_params - gp).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, gp.lpNorm<Eigen::Infinity>()));
    ++checked;
  }
  CHECK(checked > 15);
}

TEST_CASE("group average of an exact eigenfunction keeps the energy") {
  const Hamiltonian h = twin_well_chain();
  const SpectrumResult s = diagonalize(h, 16);
  const Ansatz exact = exact_ansatz(s, 1, 1);
  const double e0 = ground_state_energy(s, 1, 1);
  for (const auto& sub : subgroups(builtin_group("1d-reflection-half"))) {
    const GroupAveraged ga(exact, sub.elements());
    Rng rng(6);
    double worst = 0.0;
    int used = 0;
    for (int t = 0; t < 1000; ++t) {
      const Configuration c = random_config(exact, rng);
      const auto e = ga.evaluate(c);
      if (e.is_node() || e.log_abs < -10) continue;
      worst = std::max(worst, std::abs(local_energy(h, c, e) - e0));
      ++used;
    }
    CHECK(used > 900);
    CHECK(worst <= 1e-6 * std::abs(e0));
  }
}

TEST_CASE("data augmentation draws uniform group elements") {
  const SpaceGroup g = builtin_group("1d-reflection-half");
  const Configuration c = config_1d({0.1});
  Rng rng(7);
  std::map<std::size_t, int> counts;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const Configuration y = da_transform(g, c, rng);
    for (std::size_t k = 0; k < g.order(); ++k)
      if (torus_distance(apply_diagonal(g[k], c).positions.row(0).transpose(), y.positions.row(0).transpose()) < 1e-12)
        ++counts[k];
  }
  const double p = 1.0 / static_cast<double>(g.order());
  const double sigma = std::sqrt(n * p * (1 - p));
  REQUIRE(counts.size() == g.order());
  for (const auto& [k, cnt] : counts) CHECK(std::abs(cnt - n * p) <= 3 * sigma);

  const Configuration sym = config_1d({0.25, 0.75});
  for (int t = 0; t < 10; ++t) {
    CHECK(same_up_to_permutation(da_transform(builtin_group("1d-reflection"), sym, rng), sym));
    CHECK((da_transform(builtin_group("trivial-1d"), c, rng).positions - c.positions).norm() == 0.0);
  }
}

TEST_CASE("subsampling draws without replacement") {
  const SpaceGroup g = builtin_group("p6mm");
  auto full = gas_subsample(g, g.order(), 3, 11);
  std::sort(full.begin(), full.end());
  for (std::size_t i = 0; i < full.size(); ++i) CHECK(full[i] == i);
  CHECK(gas_subsample(g, 5, 9, 11) == gas_subsample(g, 5, 9, 11));
  CHECK(gas_subsample(g, 5, 9, 11) != gas_subsample(g, 5, 10, 11));
  for (int t = 0; t < 50; ++t) {
    auto s = gas_subsample(g, 7, static_cast<std::uint64_t>(t), 2);
    std::sort(s.begin(), s.end());
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  }
  CHECK_THROWS_AS(gas_subsample(g, 13, 0, 1), ConfigError);
  CHECK_THROWS_AS(gas_subsample(g, 0, 0, 1), ConfigError);

  std::vector<int> counts(g.order(), 0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) ++counts[gas_subsample(g, 1, static_cast<std::uint64_t>(t), 5)[0]];
  const double p = 1.0 / static_cast<double>(g.order());
  for (int cnt : counts) CHECK(std::abs(cnt - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("smoothed canonicalization reduces to the base away from boundaries") {
  const auto b = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::chain, 1.0), 3);
  const Ansatz a = Ansatz::random(b, 1, 0, false, 2, 0.5);
  const SmoothedCanonical sc(a, builtin_group("trivial-1d"), builtin_region("unit-interval"),
                             {SmoothingKind::spline2, 0.05});
  const Configuration inner = config_1d({0.4});
  CHECK(sc.evaluate(inner).log_abs == a.evaluate(inner).log_abs);
  CHECK(sc.evaluate(inner).sign == a.evaluate(inner).sign);
  const double at0 = psi_value(sc, config_1d({0.0}));
  CHECK(at0 == Approx(0.5 * (psi_value(a, config_1d({0.0})) + psi_value(a, config_1d({1.0})))));
}

TEST_CASE("smoothed canonicalization is invariant, antisymmetric and smooth") {
  const Ansatz a = random_2d(2, 1, 8);
  const SpaceGroup g = builtin_group("p4mm");
  for (auto kind : {SmoothingKind::spline2, SmoothingKind::smooth_inf}) {
    const SmoothedCanonical sc(a, g, builtin_region("p4mm-triangle"), {kind, 0.02});
    Rng rng(9);
    int checked = 0;
    for (int t = 0; t < 20; ++t) {
      const Configuration c = random_config(a, rng);
      const auto e = sc.evaluate(c);
      if (e.is_node() || e.log_abs < -6) continue;
      for (const auto& h : g.elements()) {
        const auto eh = sc.evaluate(apply_diagonal(h, c), EvalLevel::value);
        CHECK(std::abs(eh.log_abs - e.log_abs) <= 1e-10);
        CHECK(eh.sign == e.sign);
      }
      Configuration swapped = c;
      swapped.positions.row(0).swap(swapped.positions.row(1));
      const auto es = sc.evaluate(swapped, EvalLevel::value);
      CHECK(std::abs(es.log_abs - e.log_abs) <= 1e-12);
      CHECK(es.sign == -e.sign);
      // the C-infinity bump has large high derivatives inside the shell, so a small step
      const FdResult fd = finite_difference(sc, c, 2e-5);
      CAPTURE(c.positions);
      for (Eigen::Index i = 0; i < fd.grad_log.size(); ++i)
        CHECK(close_rel(e.grad_x.data()[i], fd.grad_log.data()[i], 1e-5));
      CHECK(close_rel(e.laplacian_over_psi, fd.laplacian_over_psi, 1e-5, 10.0));
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("smoothed canonicalization rejects a shell wider than the region") {
  const Ansatz a = random_2d(1, 0, 1);
  CHECK_THROWS_AS(SmoothedCanonical(a, builtin_group("p4mm"), builtin_region("p4mm-triangle"),
                                    {SmoothingKind::spline2, 0.5}),
                  ConfigError);
}
