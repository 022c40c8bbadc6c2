#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/hamiltonian.hpp"

#include <memory>
#include <vector>

namespace diagsym {

// Full single-particle spectrum in the real plane-wave basis.
struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  Mat eigenvectors;                 // columns, coefficients over basis->size() functions
  std::shared_ptr<const PlaneWaveBasis> basis;
  int cutoff = 0;
  double shift = 0.0;       // many-body constant from the Hamiltonian, added once
  double max_residual = 0.0;
  double convergence_shift = 0.0;  // change of the checked levels under cutoff + 2
  bool converged = true;
};

// One-particle Hamiltonian matrix (kinetic + Gaussian-well Fourier coefficients).
Mat one_body_matrix(const Hamiltonian& h, const PlaneWaveBasis& basis);

// levels_checked: how many of the lowest eigenvalues must be stable under cutoff + 2.
SpectrumResult diagonalize(const Hamiltonian& h, int cutoff, int levels_checked = 1);

double ground_state_energy(const SpectrumResult& s, int n_up, int n_down);

// True when the last filled and first empty level of either sector are within tol.
bool is_degenerate(const SpectrumResult& s, int n_up, int n_down, double tol = 1e-9);

// Ansatz on `basis` whose orbitals are the occupied eigenvectors.
Ansatz exact_ansatz(const SpectrumResult& s, int n_up, int n_down,
                    std::shared_ptr<const PlaneWaveBasis> basis = nullptr, bool jastrow = false);

}  // namespace diagsym
