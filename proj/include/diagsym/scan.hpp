#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/groups.hpp"

#include <iosfwd>
#include <vector>

namespace diagsym {

// f(t) = log|psi(base + t)|^2 over t on a grid covering one cell along `axes`
// (resolution points per axis, both ends included). Nodes are NaN.
struct ScanGrid {
  Configuration base;
  std::vector<int> axes;
  int resolution = 0;
  std::vector<double> values;  // row-major, first axis slowest
  std::size_t nodes = 0;

  std::size_t size() const { return values.size(); }
  Vec displacement(std::size_t index) const;  // full d-vector, zeros on unscanned axes
  std::size_t index_of(const std::vector<int>& steps) const;
};

// Throws ConfigError naming the violating element if base is not symmetric
// under the point group of `group`.
ScanGrid scan(const Wavefunction& psi, const SpaceGroup& group, const Configuration& base, int resolution,
              std::vector<int> axes = {});
// Same, without the symmetry precondition (used to compare partially symmetric bases).
ScanGrid scan_unchecked(const Wavefunction& psi, const Configuration& base, int resolution, std::vector<int> axes = {});

struct SymmetryErrorMap {
  std::vector<double> error;  // per grid point, max over g of |f(g t) - f(t)|; NaN at nodes
  double max = 0.0;
  double mean = 0.0;
  std::size_t nodes = 0;
  std::vector<double> per_element;  // max error of each group element's relation (NaN if not checkable)
  std::size_t relations_checked = 0;
  std::size_t relations_satisfied = 0;  // elements whose relation holds everywhere within tol
};

// Relations f(A t + b) = f(t) for every g = (A, b) mapping the scanned plane to itself.
SymmetryErrorMap symmetry_error(const ScanGrid& grid, const SpaceGroup& group, double tol = 1e-9);

void write_scan_csv(std::ostream& os, const ScanGrid& grid, const SymmetryErrorMap* err = nullptr);

}  // namespace diagsym
