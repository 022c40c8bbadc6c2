#include "diagsym/hamiltonian.hpp"

#include <cmath>
#include <numbers>

namespace diagsym {

double Hamiltonian::one_body(const Vec& x) const {
  if (depth == 0.0) return 0.0;
  const int d = dim();
  const int span = 2 * image_range + 1;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= span;
  const double inv2w2 = 1.0 / (2.0 * width * width);
  double v = 0.0;
  Vec shift_vec(d);
  for (const auto& r : sites) {
    const Vec base = min_image(x - r);
    for (int idx = 0; idx < total; ++idx) {
      int rem = idx;
      for (int a = 0; a < d; ++a) {
        shift_vec[a] = rem % span - image_range;
        rem /= span;
      }
      const Vec phys = lattice.basis * (base + shift_vec);
      v += std::exp(-phys.squaredNorm() * inv2w2);
    }
  }
  return -depth * v;
}

double Hamiltonian::pair(const Vec& delta) const {
  if (interaction == 0.0) return 0.0;
  const auto star = lattice.shortest_star();
  double k = 0.0;
  for (const auto& kv : star) k += 1.0 + std::cos(2.0 * std::numbers::pi * kv.cast<double>().dot(delta));
  return interaction * k / static_cast<double>(star.size());
}

double Hamiltonian::potential(const Configuration& c) const {
  if (c.dim() != dim()) throw ConfigError("configuration dimension does not match the Hamiltonian");
  double v = shift;
  for (int i = 0; i < c.size(); ++i) v += one_body(c.positions.row(i).transpose());
  if (interaction != 0.0)
    for (int i = 0; i < c.size(); ++i)
      for (int j = i + 1; j < c.size(); ++j) v += pair((c.positions.row(i) - c.positions.row(j)).transpose());
  return v;
}

double local_energy(const Hamiltonian& h, const Configuration& c, const WavefunctionEval& e) {
  if (e.is_node()) throw NumericalError("local energy requested at a node of the wavefunction");
  // Lap(psi)/psi, already including |grad log psi|^2
  return -0.5 * e.laplacian_over_psi + h.potential(c);
}

double local_energy(const Hamiltonian& h, const Wavefunction& psi, const Configuration& c) {
  return local_energy(h, c, psi.evaluate(c, EvalLevel::derivatives));
}

}  // namespace diagsym
