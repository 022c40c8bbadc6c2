#include "diagsym/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace diagsym {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

bool in_half_space(const IVec& k) {
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] > 0) return true;
    if (k[i] < 0) return false;
  }
  return false;
}

}  // namespace

std::vector<Spin> Wavefunction::spin_layout() const {
  std::vector<Spin> s(static_cast<std::size_t>(n_up()), Spin::up);
  s.resize(static_cast<std::size_t>(n_electrons()), Spin::down);
  return s;
}

PlaneWaveBasis::PlaneWaveBasis(Lattice lattice, int cutoff) : lattice_(std::move(lattice)), cutoff_(cutoff) {
  if (cutoff < 0) throw ConfigError("basis cutoff must be non-negative");
  minv_ = lattice_.inverse_metric();
  const int d = lattice_.dim();
  const IVec k0 = lattice_.shortest_star().front();
  const double unit = k0.cast<double>().dot(minv_ * k0.cast<double>());
  const int bound = 2 * cutoff + 1;
  struct Entry {
    IVec k;
    double n2;
  };
  std::vector<Entry> half;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 2 * bound + 1;
  IVec k(d);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int i = 0; i < d; ++i) {
      k[i] = rem % (2 * bound + 1) - bound;
      rem /= 2 * bound + 1;
    }
    if (!in_half_space(k)) continue;
    const Vec kd = k.cast<double>();
    const double n2 = kd.dot(minv_ * kd) / unit;
    if (n2 <= cutoff * cutoff + 1e-9) half.push_back({k, n2});
  }
  std::sort(half.begin(), half.end(), [](const Entry& a, const Entry& b) {
    if (std::abs(a.n2 - b.n2) > 1e-9) return a.n2 < b.n2;
    for (Eigen::Index i = 0; i < a.k.size(); ++i)
      if (a.k[i] != b.k[i]) return a.k[i] > b.k[i];
    return false;
  });
  kinds_.push_back(Kind::constant);
  kvecs_.push_back(IVec::Zero(d));
  knorm2_.push_back(0.0);
  for (const auto& e : half) {
    const Vec kd = e.k.cast<double>();
    const double n2 = kd.dot(minv_ * kd);
    for (Kind kind : {Kind::cosine, Kind::sine}) {
      kinds_.push_back(kind);
      kvecs_.push_back(e.k);
      knorm2_.push_back(n2);
    }
  }
}

std::optional<std::size_t> PlaneWaveBasis::index_of(const IVec& k, Kind kind) const {
  for (std::size_t b = 0; b < kinds_.size(); ++b)
    if (kinds_[b] == kind && kvecs_[b] == k) return b;
  return std::nullopt;
}

double PlaneWaveBasis::kinetic(std::size_t b) const { return 0.5 * kTwoPi * kTwoPi * knorm2_[b]; }

void PlaneWaveBasis::values(const Vec& x, Eigen::Ref<Vec> out) const {
  out[0] = 1.0;
  for (std::size_t b = 1; b < kinds_.size(); b += 2) {
    const double th = kTwoPi * kvecs_[b].cast<double>().dot(x);
    out[static_cast<Eigen::Index>(b)] = kSqrt2 * std::cos(th);
    out[static_cast<Eigen::Index>(b + 1)] = kSqrt2 * std::sin(th);
  }
}

void PlaneWaveBasis::evaluate(const Vec& x, Eigen::Ref<Vec> vals, Eigen::Ref<Mat> grads, Eigen::Ref<Vec> laps) const {
  vals[0] = 1.0;
  grads.col(0).setZero();
  laps[0] = 0.0;
  for (std::size_t b = 1; b < kinds_.size(); b += 2) {
    const auto i = static_cast<Eigen::Index>(b);
    const Vec kd = kvecs_[b].cast<double>();
    const double th = kTwoPi * kd.dot(x);
    const double c = kSqrt2 * std::cos(th), s = kSqrt2 * std::sin(th);
    const double lapf = -kTwoPi * kTwoPi * knorm2_[b];
    vals[i] = c;
    vals[i + 1] = s;
    grads.col(i) = -s * kTwoPi * kd;
    grads.col(i + 1) = c * kTwoPi * kd;
    laps[i] = lapf * c;
    laps[i + 1] = lapf * s;
  }
}

Mat PlaneWaveBasis::representation(const Isometry& g) const {
  const auto nb = static_cast<Eigen::Index>(size());
  Mat r = Mat::Zero(nb, nb);
  r(0, 0) = 1.0;
  const Mat at = g.rotation.transpose();
  for (std::size_t b = 1; b < kinds_.size(); b += 2) {
    const Vec kd = kvecs_[b].cast<double>();
    const IVec kp = (at * kd).array().round().cast<int>().matrix();
    const double phi = kTwoPi * kd.dot(g.translation);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const bool flip = !in_half_space(kp);
    const IVec kh = flip ? IVec(-kp) : kp;
    const auto ic = index_of(kh, Kind::cosine);
    if (!ic) throw ConfigError("plane-wave basis is not closed under the group (raise or change the cutoff)");
    const auto c_new = static_cast<Eigen::Index>(*ic), s_new = c_new + 1;
    const auto c_old = static_cast<Eigen::Index>(b), s_old = c_old + 1;
    const double sgn = flip ? -1.0 : 1.0;
    r(c_new, c_old) += cp;
    r(s_new, c_old) += -sgn * sp;
    r(s_new, s_old) += sgn * cp;
    r(c_new, s_old) += sp;
  }
  return r;
}

Ansatz::Ansatz(std::shared_ptr<const PlaneWaveBasis> basis, int n_up, int n_down, bool jastrow, Vec params)
    : basis_(std::move(basis)), n_up_(n_up), n_down_(n_down), jastrow_(jastrow), params_(std::move(params)) {
  if (!basis_) throw ConfigError("ansatz needs a basis");
  if (n_up < 0 || n_down < 0 || n_up + n_down == 0) throw ConfigError("ansatz needs at least one electron");
  const auto nb = basis_->size();
  if (static_cast<std::size_t>(std::max(n_up, n_down)) > nb)
    throw ConfigError("basis has " + std::to_string(nb) + " functions, fewer than the number of orbitals");
  const std::size_t expect = static_cast<std::size_t>(n_up + n_down) * nb + (jastrow ? 2 : 0);
  if (static_cast<std::size_t>(params_.size()) != expect)
    throw ConfigError("ansatz expects " + std::to_string(expect) + " parameters, got " +
                      std::to_string(params_.size()));
  if (jastrow_) star_ = basis_->lattice().shortest_star();
}

Ansatz Ansatz::random(std::shared_ptr<const PlaneWaveBasis> basis, int n_up, int n_down, bool jastrow,
                      std::uint64_t seed, double scale) {
  const auto nb = static_cast<Eigen::Index>(basis->size());
  Vec p = Vec::Zero((n_up + n_down) * nb + (jastrow ? 2 : 0));
  Rng rng = make_rng(seed, "ansatz-init");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < 2; ++s) {
    const int ns = s == 0 ? n_up : n_down;
    const Eigen::Index off = s == 0 ? 0 : n_up * nb;
    for (int j = 0; j < ns; ++j) {
      for (Eigen::Index b = 0; b < nb; ++b) p[off + j * nb + b] = scale * normal(rng);
      if (j < nb) p[off + j * nb + j] += 1.0;
    }
  }
  return Ansatz(std::move(basis), n_up, n_down, jastrow, std::move(p));
}

Ansatz Ansatz::with_params(Vec params) const { return Ansatz(basis_, n_up_, n_down_, jastrow_, std::move(params)); }

Mat Ansatz::orbitals(Spin s) const {
  const auto nb = static_cast<Eigen::Index>(basis_->size());
  const int ns = s == Spin::up ? n_up_ : n_down_;
  Mat c(ns, nb);
  const auto off = static_cast<Eigen::Index>(offset(s));
  for (int j = 0; j < ns; ++j) c.row(j) = params_.segment(off + j * nb, nb).transpose();
  return c;
}

Ansatz Ansatz::with_orbitals(const Mat& up, const Mat& down) const {
  const auto nb = static_cast<Eigen::Index>(basis_->size());
  if (up.rows() != n_up_ || down.rows() != n_down_ || (n_up_ > 0 && up.cols() != nb) ||
      (n_down_ > 0 && down.cols() != nb))
    throw ConfigError("orbital matrix shape does not match the ansatz");
  Vec p = params_;
  for (int j = 0; j < n_up_; ++j) p.segment(j * nb, nb) = up.row(j).transpose();
  for (int j = 0; j < n_down_; ++j) p.segment((n_up_ + j) * nb, nb) = down.row(j).transpose();
  return with_params(std::move(p));
}

WavefunctionEval Ansatz::evaluate(const Configuration& c, EvalLevel level) const {
  const int n = n_up_ + n_down_;
  const int d = dim();
  if (c.size() != n || c.dim() != d || static_cast<int>(c.spins.size()) != n)
    throw ConfigError("configuration shape does not match the ansatz (" + std::to_string(n) + " electrons, dim " +
                      std::to_string(d) + ")");
  const bool derivs = level == EvalLevel::derivatives;
  const auto nb = static_cast<Eigen::Index>(basis_->size());
  const Mat& minv = basis_->inverse_metric();

  WavefunctionEval out;
  out.log_abs = 0.0;
  out.sign = 1;
  Mat gdet;  // gradient of log|D| per electron
  double lap_det = 0.0;
  if (derivs) {
    out.grad_x = Mat::Zero(n, d);
    gdet = Mat::Zero(n, d);
    out.grad_params = Vec::Zero(static_cast<Eigen::Index>(num_params()));
  }

  std::vector<int> rows[2];
  for (int i = 0; i < n; ++i) rows[c.spins[i] == Spin::up ? 0 : 1].push_back(i);
  if (static_cast<int>(rows[0].size()) != n_up_)
    throw ConfigError("configuration has " + std::to_string(rows[0].size()) + " up electrons, ansatz expects " +
                      std::to_string(n_up_));

  Vec vals(nb), laps(nb);
  Mat grads(d, nb);
  for (int s = 0; s < 2; ++s) {
    const auto& idx = rows[s];
    const auto ns = static_cast<Eigen::Index>(idx.size());
    if (ns == 0) continue;
    const Mat coef = orbitals(s == 0 ? Spin::up : Spin::down);
    Mat bv(ns, nb), bl(ns, nb);
    std::vector<Mat> bg;
    for (Eigen::Index i = 0; i < ns; ++i) {
      const Vec x = c.positions.row(idx[i]).transpose();
      if (derivs) {
        basis_->evaluate(x, vals, grads, laps);
        bl.row(i) = laps.transpose();
        bg.push_back(grads);
      } else {
        basis_->values(x, vals);
      }
      bv.row(i) = vals.transpose();
    }
    const Mat phi = bv * coef.transpose();  // phi(i, j) = phi_j(x_i)
    Eigen::PartialPivLU<Mat> lu(phi);
    // |phi_j(x)| <= sqrt2 * sum_b |C_jb|, so pivots far below that scale mean a node
    const double scale = kSqrt2 * coef.cwiseAbs().rowwise().sum().maxCoeff();
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(lu.rcond() >= 1e-12) || !(min_pivot >= 1e-12 * scale)) return WavefunctionEval{};
    const double det = lu.determinant();
    if (det == 0.0 || !std::isfinite(det)) return WavefunctionEval{};
    out.log_abs += std::log(std::abs(det));
    if (det < 0) out.sign = -out.sign;
    if (!derivs) continue;
    const Mat inv = lu.inverse();  // inv(j, i)
    for (Eigen::Index i = 0; i < ns; ++i) {
      gdet.row(idx[i]) = (bg[i] * coef.transpose() * inv.col(i)).transpose();
      lap_det += (bl.row(i) * coef.transpose()).dot(inv.col(i));
    }
    const Mat dcoef = inv * bv;  // d log|D| / dC(j, b)
    const auto off = static_cast<Eigen::Index>(offset(s == 0 ? Spin::up : Spin::down));
    for (Eigen::Index j = 0; j < ns; ++j) out.grad_params.segment(off + j * nb, nb) = dcoef.row(j).transpose();
  }

  if (jastrow_) {
    const Eigen::Index pj = static_cast<Eigen::Index>(num_params()) - 2;
    const double p1 = params_[pj], p2 = params_[pj + 1];
    const double ns = static_cast<double>(star_.size());
    double jsum = 0.0, f1 = 0.0, f2 = 0.0;
    Mat gj = Mat::Zero(n, d);
    Vec lj = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Vec delta = (c.positions.row(i) - c.positions.row(j)).transpose();
        double f = 0.0, lf = 0.0;
        Vec gf = Vec::Zero(d);
        for (const auto& k : star_) {
          const Vec kd = k.cast<double>();
          const double th = kTwoPi * kd.dot(delta);
          f += 1.0 - std::cos(th);
          if (derivs) {
            gf += std::sin(th) * kTwoPi * kd;
            lf += std::cos(th) * kTwoPi * kTwoPi * kd.dot(minv * kd);
          }
        }
        f /= ns;
        jsum += p1 * f + p2 * f * f;
        if (!derivs) continue;
        gf /= ns;
        lf /= ns;
        f1 += f;
        f2 += f * f;
        const double up = p1 + 2.0 * p2 * f;
        const Vec gu = up * gf;
        const double lu = up * lf + 2.0 * p2 * gf.dot(minv * gf);
        gj.row(i) += gu.transpose();
        gj.row(j) -= gu.transpose();
        lj[i] += lu;
        lj[j] += lu;
      }
    }
    out.log_abs += jsum;
    if (derivs) {
      out.grad_params[pj] = f1;
      out.grad_params[pj + 1] = f2;
      double lap = lap_det;
      for (int i = 0; i < n; ++i) {
        const Vec gd = gdet.row(i).transpose(), gji = gj.row(i).transpose();
        lap += lj[i] + 2.0 * gd.dot(minv * gji) + gji.dot(minv * gji);
      }
      out.grad_x = gdet + gj;
      out.laplacian_over_psi = lap;
    }
  } else if (derivs) {
    out.grad_x = gdet;
    out.laplacian_over_psi = lap_det;
  }
  return out;
}

Ansatz perturb_asymmetric(const Ansatz& a, const SpaceGroup& group, double magnitude, std::uint64_t seed) {
  if (a.n_up() < 1) throw ConfigError("perturb_asymmetric needs at least one up electron");
  if (group.dim() != a.dim()) throw ConfigError("group dimension does not match the ansatz");
  const PlaneWaveBasis& basis = a.basis();
  const Mat up = a.orbitals(Spin::up), down = a.orbitals(Spin::down);
  const Vec phi = up.row(0).transpose();
  const double norm = phi.norm();
  if (!(norm > 0.0)) throw ConfigError("first up orbital is zero");
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const auto character = [](const Mat& dg, const Vec& v) {
    const Vec img = dg * v;
    const double chi = img.dot(v) / v.squaredNorm();
    if (std::abs(std::abs(chi) - 1.0) > 1e-8 || (img - chi * v).norm() > 1e-8 * v.norm())
      throw ConfigError("orbitals do not transform as one-dimensional representations of the group");
    return std::round(chi);
  };
  // eta = det[delta, rest]; eta^G = det[P delta, rest] with P the projector onto
  // the channel whose character is the product of the remaining orbitals' characters.
  Mat proj = Mat::Zero(nb, nb);
  for (const auto& g : group.elements()) {
    const Mat dg = basis.representation(g);
    double chi = 1.0;
    for (Eigen::Index i = 1; i < up.rows(); ++i) chi *= character(dg, up.row(i).transpose());
    for (Eigen::Index i = 0; i < down.rows(); ++i) chi *= character(dg, down.row(i).transpose());
    character(dg, phi);
    proj += chi * dg;
  }
  proj /= static_cast<double>(group.order());
  Rng rng = make_rng(seed, "perturb-asymmetric");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec r(nb);
  for (Eigen::Index b = 0; b < nb; ++b) r[b] = normal(rng);
  Vec delta = r - proj * r;
  if (delta.norm() < 1e-12) throw ConfigError("basis has no direction outside the orbital's symmetry channel");
  delta *= magnitude * norm / delta.norm();
  Vec p = a.params();
  p.head(nb) += delta;
  return a.with_params(std::move(p));
}

}  // namespace diagsym
