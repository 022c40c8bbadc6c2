#pragma once

#include "diagsym/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace diagsym {

enum class LatticeKind { chain, square, hexagonal, cubic };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(std::string_view name);

// Positions everywhere are lattice coordinates on the unit torus [0,1)^d.
// The physical basis only matters for kinetic and potential terms.
struct Lattice {
  LatticeKind kind = LatticeKind::chain;
  Mat basis;  // columns are the primitive vectors

  static Lattice make(LatticeKind kind, double scale);

  int dim() const { return static_cast<int>(basis.cols()); }
  double scale() const { return basis.col(0).norm(); }
  Mat metric() const { return basis.transpose() * basis; }
  // (B^T B)^{-1}: turns lattice-coordinate second derivatives into the physical Laplacian.
  Mat inverse_metric() const { return metric().inverse(); }
  double cell_volume() const { return std::abs(basis.determinant()); }
  // Shortest nonzero integer wavevectors k (physical |2 pi B^{-T} k| minimal), one of each +/- pair.
  std::vector<IVec> shortest_star() const;
};

// x -> A x + b in lattice coordinates. A has entries in {-1,0,1}.
struct Isometry {
  Mat rotation;
  Vec translation;

  static Isometry identity(int dim);
  int dim() const { return static_cast<int>(translation.size()); }
  Vec apply(const Vec& x) const { return rotation * x + translation; }
};

Isometry compose(const Isometry& g, const Isometry& h);  // g after h
Isometry canonical(const Isometry& g);                   // translation reduced into [0,1)
Isometry inverse(const Isometry& g);
bool same_on_torus(const Isometry& g, const Isometry& h, double tol = 1e-9);
bool canonical_less(const Isometry& g, const Isometry& h, double tol = 1e-9);
bool is_identity_on_torus(const Isometry& g, double tol = 1e-9);
// Throws ConfigError unless g has integer entries in {-1,0,1} and is orthogonal in physical space.
void validate_isometry(const Isometry& g, const Lattice& lattice);

class SpaceGroup {
 public:
  SpaceGroup() = default;
  SpaceGroup(int dim, std::vector<Isometry> elements, std::vector<Isometry> generators,
             std::string name = {});

  int dim() const { return dim_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Isometry>& elements() const { return elements_; }
  const Isometry& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Isometry>& generators() const { return generators_; }
  const std::string& name() const { return name_; }
  std::optional<std::size_t> find(const Isometry& g, double tol = 1e-9) const;
  std::vector<Isometry> subset(std::span<const std::size_t> indices) const;
  // Checks closure, identity and inverses; used by tests and the config validator.
  bool satisfies_axioms(double tol = 1e-9) const;

 private:
  int dim_ = 0;
  std::vector<Isometry> elements_;
  std::vector<Isometry> generators_;
  std::string name_;
};

// Breadth-first closure from the identity; elements within a level are sorted,
// so the element order only depends on the generator set.
SpaceGroup close_group(int dim, std::span<const Isometry> generators, std::size_t max_order = 192,
                       std::string name = {});

// The point group: translations dropped, then re-closed.
SpaceGroup build_g_tilde(const SpaceGroup& group);

// Subgroups generated by at most two elements, deduplicated, sorted by order.
std::vector<SpaceGroup> subgroups(const SpaceGroup& group);

struct BuiltinGroupInfo {
  std::string name;
  LatticeKind lattice;
  std::string description;
};
std::vector<BuiltinGroupInfo> builtin_groups();
SpaceGroup builtin_group(std::string_view name);
LatticeKind builtin_group_lattice(std::string_view name);

enum class Spin : std::uint8_t { up = 0, down = 1 };

struct Configuration {
  Mat positions;  // n x d, lattice coordinates
  std::vector<Spin> spins;

  int size() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

double wrap_unit(double x);
Vec wrap(const Vec& x);
Vec min_image(const Vec& delta);
// Max-coordinate minimum-image distance on the torus.
double torus_distance(const Vec& a, const Vec& b);

Configuration apply_diagonal(const Isometry& g, const Configuration& c);

// Index of the first group element that does not map the set {x_i} to itself
// (up to a same-spin permutation), or nullopt if c is symmetric.
std::optional<std::size_t> first_symmetry_violation(const SpaceGroup& group, const Configuration& c,
                                                    double tol = 1e-9);
bool is_symmetric_configuration(const SpaceGroup& group, const Configuration& c, double tol = 1e-9);

// Union of the orbits of the given points (deduplicated), all with one spin.
Configuration orbit_configuration(const SpaceGroup& group, std::span<const Vec> seeds, Spin spin,
                                  double tol = 1e-9);

}  // namespace diagsym
