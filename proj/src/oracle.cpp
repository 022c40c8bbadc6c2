#include "diagsym/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace diagsym {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fourier coefficient of V: integral over the unit cell of V(x) exp(-2 pi i q.x) dx.
cd potential_coefficient(const Hamiltonian& h, const IVec& q) {
  if (h.depth == 0.0 || h.sites.empty()) return 0.0;
  const int d = h.dim();
  const Vec qd = q.cast<double>();
  const double q2 = qd.dot(h.lattice.inverse_metric() * qd);
  const double gauss = std::pow(kTwoPi * h.width * h.width, 0.5 * d) *
                       std::exp(-0.5 * h.width * h.width * kTwoPi * kTwoPi * q2) / h.lattice.cell_volume();
  cd phase = 0.0;
  for (const auto& r : h.sites) phase += std::polar(1.0, -kTwoPi * qd.dot(r));
  return -h.depth * gauss * phase;
}

}  // namespace

Mat one_body_matrix(const Hamiltonian& h, const PlaneWaveBasis& basis) {
  if (basis.dim() != h.dim()) throw ConfigError("basis and Hamiltonian dimensions differ");
  const auto nb = static_cast<Eigen::Index>(basis.size());
  // complex plane waves: index 0 is k = 0, then (+k, -k) per half-space vector
  const Eigen::Index nc = nb;
  std::vector<IVec> ks(static_cast<std::size_t>(nc));
  ks[0] = basis.wavevector(0);
  for (Eigen::Index b = 1; b < nb; b += 2) {
    ks[static_cast<std::size_t>(b)] = basis.wavevector(static_cast<std::size_t>(b));
    ks[static_cast<std::size_t>(b + 1)] = -basis.wavevector(static_cast<std::size_t>(b));
  }
  Eigen::MatrixXcd hc(nc, nc);
  for (Eigen::Index m = 0; m < nc; ++m)
    for (Eigen::Index n = 0; n < nc; ++n)
      hc(m, n) = potential_coefficient(h, ks[static_cast<std::size_t>(m)] - ks[static_cast<std::size_t>(n)]);
  // real functions b = sum_m U(b, m) e_m
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(nb, nc);
  const double r2 = 1.0 / std::sqrt(2.0);
  u(0, 0) = 1.0;
  for (Eigen::Index b = 1; b < nb; b += 2) {
    u(b, b) = r2;
    u(b, b + 1) = r2;
    u(b + 1, b) = cd(0.0, -r2);
    u(b + 1, b + 1) = cd(0.0, r2);
  }
  const Eigen::MatrixXcd hr = u.conjugate() * hc * u.transpose();
  Mat out = hr.real();
  for (Eigen::Index b = 0; b < nb; ++b) out(b, b) += basis.kinetic(static_cast<std::size_t>(b));
  return 0.5 * (out + out.transpose());
}

namespace {

SpectrumResult solve(const Hamiltonian& h, int cutoff) {
  SpectrumResult s;
  s.basis = std::make_shared<const PlaneWaveBasis>(h.lattice, cutoff);
  s.cutoff = cutoff;
  s.shift = h.shift;
  const Mat hm = one_body_matrix(h, *s.basis);
  Eigen::SelfAdjointEigenSolver<Mat> es(hm);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  s.eigenvectors = es.eigenvectors();
  s.max_residual = (hm * s.eigenvectors - s.eigenvectors * es.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff();
  return s;
}

}  // namespace

SpectrumResult diagonalize(const Hamiltonian& h, int cutoff, int levels_checked) {
  if (h.interaction != 0.0) throw ConfigError("oracle requires non-interacting Hamiltonian (interaction = 0)");
  if (cutoff < 1) throw ConfigError("oracle cutoff must be >= 1");
  SpectrumResult s = solve(h, cutoff);
  const SpectrumResult wider = solve(h, cutoff + 2);
  const auto levels = std::min<std::size_t>(static_cast<std::size_t>(std::max(levels_checked, 1)), s.eigenvalues.size());
  for (std::size_t i = 0; i < levels; ++i)
    s.convergence_shift = std::max(s.convergence_shift, std::abs(s.eigenvalues[i] - wider.eigenvalues[i]));
  s.converged = s.convergence_shift <= 1e-8;
  return s;
}

double ground_state_energy(const SpectrumResult& s, int n_up, int n_down) {
  if (n_up < 0 || n_down < 0) throw ConfigError("electron counts must be non-negative");
  if (static_cast<std::size_t>(std::max(n_up, n_down)) > s.eigenvalues.size())
    throw ConfigError("spectrum has fewer levels than electrons in a spin sector");
  double e = s.shift;
  for (int i = 0; i < n_up; ++i) e += s.eigenvalues[static_cast<std::size_t>(i)];
  for (int i = 0; i < n_down; ++i) e += s.eigenvalues[static_cast<std::size_t>(i)];
  return e;
}

bool is_degenerate(const SpectrumResult& s, int n_up, int n_down, double tol) {
  for (int n : {n_up, n_down}) {
    if (n <= 0 || static_cast<std::size_t>(n) >= s.eigenvalues.size()) continue;
    if (std::abs(s.eigenvalues[static_cast<std::size_t>(n)] - s.eigenvalues[static_cast<std::size_t>(n - 1)]) < tol)
      return true;
  }
  return false;
}

Ansatz exact_ansatz(const SpectrumResult& s, int n_up, int n_down, std::shared_ptr<const PlaneWaveBasis> basis,
                    bool jastrow) {
  if (!basis) basis = s.basis;
  const auto nb = static_cast<Eigen::Index>(basis->size());
  auto coefficients = [&](int n) {
    Mat c = Mat::Zero(n, nb);
    for (int j = 0; j < n; ++j) {
      for (Eigen::Index b = 0; b < s.eigenvectors.rows(); ++b) {
        const auto bi = static_cast<std::size_t>(b);
        const auto target = basis->index_of(s.basis->wavevector(bi), s.basis->kind(bi));
        if (!target) throw ConfigError("oracle basis is not contained in the ansatz basis");
        c(j, static_cast<Eigen::Index>(*target)) = s.eigenvectors(b, j);
      }
    }
    return c;
  };
  Vec p = Vec::Zero((n_up + n_down) * nb + (jastrow ? 2 : 0));
  Ansatz a(basis, n_up, n_down, jastrow, std::move(p));
  return a.with_orbitals(coefficients(n_up), coefficients(n_down));
}

}  // namespace diagsym
