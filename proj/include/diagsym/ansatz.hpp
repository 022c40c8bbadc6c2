#pragma once

#include "diagsym/common.hpp"
#include "diagsym/groups.hpp"
#include "diagsym/rng.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace diagsym {

enum class EvalLevel { value, derivatives };

// log|psi| and sign; derivatives are of log|psi| (gradients in lattice
// coordinates, Laplacian is the physical one, divided by psi).
struct WavefunctionEval {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
  Mat grad_x;  // n x d
  double laplacian_over_psi = 0.0;
  Vec grad_params;

  bool is_node() const { return sign == 0; }
};

class Wavefunction {
 public:
  virtual ~Wavefunction() = default;
  virtual WavefunctionEval evaluate(const Configuration& c, EvalLevel level = EvalLevel::derivatives) const = 0;
  virtual std::size_t num_params() const = 0;
  virtual int n_up() const = 0;
  virtual int n_down() const = 0;
  virtual int dim() const = 0;
  virtual const Mat& inverse_metric() const = 0;

  int n_electrons() const { return n_up() + n_down(); }
  // Spin of each row of a configuration: all up electrons first.
  std::vector<Spin> spin_layout() const;
};

// Real orthonormal Fourier basis on the torus:
// 1, sqrt2 cos(2 pi k.x), sqrt2 sin(2 pi k.x) for k in a half-space with
// k^T M k <= cutoff^2 (M normalised so the shortest nonzero k has length 1).
class PlaneWaveBasis {
 public:
  enum class Kind { constant, cosine, sine };

  PlaneWaveBasis(Lattice lattice, int cutoff);

  std::size_t size() const { return kinds_.size(); }
  int dim() const { return lattice_.dim(); }
  int cutoff() const { return cutoff_; }
  const Lattice& lattice() const { return lattice_; }
  const Mat& inverse_metric() const { return minv_; }
  Kind kind(std::size_t b) const { return kinds_[b]; }
  const IVec& wavevector(std::size_t b) const { return kvecs_[b]; }
  std::optional<std::size_t> index_of(const IVec& k, Kind kind) const;
  // 1/2 |2 pi B^{-T} k|^2, the kinetic energy of basis function b.
  double kinetic(std::size_t b) const;

  void values(const Vec& x, Eigen::Ref<Vec> out) const;
  // grads: d x nb; laps: physical Laplacian of each function.
  void evaluate(const Vec& x, Eigen::Ref<Vec> vals, Eigen::Ref<Mat> grads, Eigen::Ref<Vec> laps) const;

  // D(g) with (f o g) = sum_b (D c)_b b_b for f = sum_b c_b b_b.
  Mat representation(const Isometry& g) const;

 private:
  Lattice lattice_;
  int cutoff_;
  Mat minv_;
  std::vector<Kind> kinds_;
  std::vector<IVec> kvecs_;
  std::vector<double> knorm2_;
};

// Slater determinant per spin sector (orbitals expanded in the plane-wave
// basis), optionally times a symmetric two-body Jastrow factor.
// Parameter layout: C_up (row-major n_up x nb), C_down, then Jastrow (p1, p2).
class Ansatz : public Wavefunction {
 public:
  Ansatz(std::shared_ptr<const PlaneWaveBasis> basis, int n_up, int n_down, bool jastrow, Vec params);

  // Orbital j starts as basis function j plus N(0, scale^2) noise.
  static Ansatz random(std::shared_ptr<const PlaneWaveBasis> basis, int n_up, int n_down, bool jastrow,
                       std::uint64_t seed, double scale);

  WavefunctionEval evaluate(const Configuration& c, EvalLevel level = EvalLevel::derivatives) const override;
  std::size_t num_params() const override { return static_cast<std::size_t>(params_.size()); }
  int n_up() const override { return n_up_; }
  int n_down() const override { return n_down_; }
  int dim() const override { return basis_->dim(); }
  const Mat& inverse_metric() const override { return basis_->inverse_metric(); }

  const Vec& params() const { return params_; }
  Ansatz with_params(Vec params) const;
  bool has_jastrow() const { return jastrow_; }
  const PlaneWaveBasis& basis() const { return *basis_; }
  const std::shared_ptr<const PlaneWaveBasis>& basis_ptr() const { return basis_; }
  Mat orbitals(Spin s) const;  // n_s x nb
  Ansatz with_orbitals(const Mat& up, const Mat& down) const;

 private:
  std::shared_ptr<const PlaneWaveBasis> basis_;
  int n_up_, n_down_;
  bool jastrow_;
  Vec params_;
  std::vector<IVec> star_;

  std::size_t offset(Spin s) const { return s == Spin::up ? 0 : static_cast<std::size_t>(n_up_) * basis_->size(); }
};

// Returns psi* + eta with eta^G = 0: the first up orbital is shifted by a
// random coefficient vector with no component in the channel carried by the
// product of the other orbitals' characters. Requires every orbital to
// transform as a 1D representation of G.
Ansatz perturb_asymmetric(const Ansatz& a, const SpaceGroup& group, double magnitude, std::uint64_t seed);

}  // namespace diagsym
