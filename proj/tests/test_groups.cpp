#include "support/fixtures.hpp"

#include <doctest.h>

using namespace diagsym;
using fixtures::iso;

namespace {

bool same(const Isometry& g, const Isometry& h) {
  return (g.rotation - h.rotation).norm() < 1e-12 && (g.translation - h.translation).norm() < 1e-12;
}

}  // namespace

TEST_CASE("compose follows x -> g(h(x))") {
  const Isometry refl = iso({{-1}}, {0});
  const Isometry shift = iso({{1}}, {1});
  CHECK(same(compose(refl, shift), iso({{-1}}, {-1})));
  CHECK(same(compose(refl, Isometry::identity(1)), refl));

  const Isometry r90 = iso({{0, -1}, {1, 0}}, {0, 0});
  const Isometry r270 = compose(r90, compose(r90, r90));
  CHECK(same(r270, iso({{0, 1}, {-1, 0}}, {0, 0})));
  const Vec e1 = Vec::Unit(2, 0);
  CHECK((r270.apply(e1) - Vec::Unit(2, 1) * -1.0).norm() < 1e-15);
}

TEST_CASE("canonical reduces translations mod 1") {
  CHECK(same(canonical(iso({{1}}, {1.25})), iso({{1}}, {0.25})));
  CHECK(same(canonical(iso({{-1}}, {-0.5})), iso({{-1}}, {0.5})));
  CHECK(same(canonical(Isometry::identity(2)), Isometry::identity(2)));
}

TEST_CASE("closure from generators") {
  const std::vector<Isometry> refl{iso({{-1}}, {0})};
  const SpaceGroup z2 = close_group(1, refl);
  CHECK(z2.order() == 2);
  CHECK(z2.find(Isometry::identity(1)).has_value());
  CHECK(z2.find(iso({{-1}}, {0})).has_value());

  const std::vector<Isometry> d4{iso({{0, -1}, {1, 0}}, {0, 0}), iso({{1, 0}, {0, -1}}, {0, 0})};
  CHECK(close_group(2, d4).order() == 8);
  CHECK(close_group(2, std::vector<Isometry>{}).order() == 1);
}

TEST_CASE("closure that does not terminate is reported") {
  const std::vector<Isometry> irrational{iso({{1}}, {std::sqrt(0.5)})};
  CHECK_THROWS_AS(close_group(1, irrational, 50), ConfigError);
}

TEST_CASE("builtin groups have the expected orders and are groups") {
  const std::vector<std::pair<std::string, std::size_t>> expected{
      {"trivial-1d", 1}, {"1d-reflection", 2}, {"1d-half-translation", 2}, {"1d-reflection-half", 4},
      {"p2mm", 4},       {"p4mm", 8},          {"p4mm-centred", 16},       {"p6mm", 12},
      {"pm-3m", 48},     {"fm-3m", 192}};
  for (const auto& [name, order] : expected) {
    CAPTURE(name);
    const SpaceGroup g = builtin_group(name);
    CHECK(g.order() == order);
    CHECK(g.satisfies_axioms());
    for (const auto& e : g.elements()) CHECK_NOTHROW(validate_isometry(e, Lattice::make(builtin_group_lattice(name), 1.0)));
  }
  CHECK_THROWS_AS(builtin_group("p3"), ConfigError);
}

TEST_CASE("element order is reproducible") {
  const SpaceGroup a = builtin_group("p6mm");
  const SpaceGroup b = builtin_group("p6mm");
  for (std::size_t i = 0; i < a.order(); ++i) CHECK(same(a[i], b[i]));
  CHECK(is_identity_on_torus(a[0]));
}

TEST_CASE("composition and inverse stay in the group") {
  for (const char* name : {"p4mm-centred", "p6mm", "pm-3m"}) {
    const SpaceGroup g = builtin_group(name);
    for (const auto& x : g.elements()) {
      CHECK(g.find(inverse(x)).has_value());
      CHECK(is_identity_on_torus(compose(x, inverse(x))));
      for (std::size_t j = 0; j < g.order(); j += 3) CHECK(g.find(compose(x, g[j])).has_value());
    }
  }
}

TEST_CASE("compose agrees with sequential application") {
  Rng rng(11);
  const SpaceGroup g = builtin_group("pm-3m");
  for (int t = 0; t < 50; ++t) {
    const auto& a = g[rng() % g.order()];
    const auto& b = g[rng() % g.order()];
    Vec x(3);
    for (int l = 0; l < 3; ++l) x[l] = uniform01(rng);
    CHECK((compose(a, b).apply(x) - a.apply(b.apply(x))).norm() < 1e-14);
  }
}

TEST_CASE("isometries must preserve the lattice metric") {
  const Isometry shear = iso({{1, 1}, {0, 1}}, {0, 0});
  CHECK_THROWS_AS(validate_isometry(shear, Lattice::make(LatticeKind::square, 1.0)), ConfigError);
  const Isometry r60 = iso({{1, -1}, {1, 0}}, {0, 0});
  CHECK_NOTHROW(validate_isometry(r60, Lattice::make(LatticeKind::hexagonal, 1.0)));
  CHECK_THROWS_AS(validate_isometry(r60, Lattice::make(LatticeKind::square, 1.0)), ConfigError);
}

TEST_CASE("apply_diagonal acts on every electron and wraps") {
  const auto c = fixtures::config_1d({0.2, 0.7});
  const auto r = apply_diagonal(iso({{-1}}, {0}), c);
  CHECK(r.positions(0, 0) == doctest::Approx(0.8));
  CHECK(r.positions(1, 0) == doctest::Approx(0.3));
  CHECK((apply_diagonal(Isometry::identity(1), c).positions - c.positions).norm() == 0.0);

  Configuration c2{Mat(2, 2), {Spin::up, Spin::up}};
  c2.positions << 0.25, 0.25, 0.75, 0.5;
  const auto t = apply_diagonal(iso({{1, 0}, {0, 1}}, {0.5, 0}), c2);
  Mat want(2, 2);
  want << 0.75, 0.25, 0.25, 0.5;
  CHECK((t.positions - want).norm() < 1e-15);
}

TEST_CASE("point group of a space group") {
  CHECK(build_g_tilde(builtin_group("1d-half-translation")).order() == 1);
  const SpaceGroup glide = close_group(1, std::vector<Isometry>{iso({{-1}}, {0.5})});
  const SpaceGroup gt = build_g_tilde(glide);
  CHECK(gt.order() == 2);
  CHECK(gt.find(iso({{-1}}, {0})).has_value());
  const SpaceGroup p4 = builtin_group("p4mm");
  CHECK(build_g_tilde(p4).order() == p4.order());
}

TEST_CASE("symmetric configurations") {
  const SpaceGroup refl = builtin_group("1d-reflection");
  CHECK(is_symmetric_configuration(builtin_group("trivial-1d"), fixtures::config_1d({0.13, 0.4})));
  CHECK(is_symmetric_configuration(refl, fixtures::config_1d({0.25, 0.75})));
  CHECK_FALSE(is_symmetric_configuration(refl, fixtures::config_1d({0.2, 0.75})));
  // opposite spins are not interchangeable
  CHECK_FALSE(is_symmetric_configuration(refl, fixtures::config_1d({0.25, 0.75}, {Spin::up, Spin::down})));
}

TEST_CASE("orbit configurations are symmetric") {
  for (const char* name : {"p4mm", "p6mm", "p4mm-centred"}) {
    const SpaceGroup g = builtin_group(name);
    const std::vector<Vec> seeds{(Vec(2) << 0.11, 0.27).finished()};
    const Configuration c = orbit_configuration(g, seeds, Spin::up);
    CHECK(is_symmetric_configuration(g, c));
    CHECK(static_cast<std::size_t>(c.size()) == g.order());
  }
}

TEST_CASE("subgroups") {
  const auto subs = subgroups(builtin_group("p4mm"));
  CHECK(subs.front().order() == 1);
  CHECK(subs.back().order() == 8);
  for (const auto& s : subs) {
    CHECK(s.satisfies_axioms());
    CHECK(8 % s.order() == 0);
  }
}

TEST_CASE("torus helpers") {
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
  CHECK(wrap_unit(1.0) == 0.0);
  CHECK(min_image((Vec(1) << 0.9).finished())[0] == doctest::Approx(-0.1));
  CHECK(torus_distance((Vec(2) << 0.05, 0.5).finished(), (Vec(2) << 0.95, 0.45).finished()) ==
        doctest::Approx(0.1));
}
