#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/groups.hpp"

#include <vector>

namespace diagsym {

// H = -1/2 sum_i Lap_i + sum_i V(x_i) + interaction * sum_{i<j} K(x_i - x_j) + shift
// V(x) = -depth * sum_sites sum_images exp(-|B(x - r + n)|^2 / (2 width^2))
// K(D) = (1/|S|) sum_{k in S} (1 + cos 2 pi k.D), S the shortest reciprocal star.
struct Hamiltonian {
  Lattice lattice;
  std::vector<Vec> sites;  // lattice coordinates
  double depth = 0.0;
  double width = 0.1;  // physical units
  double interaction = 0.0;
  double shift = 0.0;
  int image_range = 3;

  int dim() const { return lattice.dim(); }
  double one_body(const Vec& x) const;
  double pair(const Vec& delta) const;
  double potential(const Configuration& c) const;
};

// -1/2 Lap(psi)/psi + V for an evaluation with derivatives.
double local_energy(const Hamiltonian& h, const Configuration& c, const WavefunctionEval& e);
double local_energy(const Hamiltonian& h, const Wavefunction& psi, const Configuration& c);

}  // namespace diagsym
