#pragma once

#include "diagsym/ansatz.hpp"
#include "diagsym/smoothing.hpp"

#include <span>
#include <vector>

namespace diagsym {

// psi^G(x) = (1/|S|) sum_{g in S} psi(g x), evaluated in the log domain.
class GroupAveraged : public Wavefunction {
 public:
  GroupAveraged(Ansatz base, std::vector<Isometry> subset);

  WavefunctionEval evaluate(const Configuration& c, EvalLevel level = EvalLevel::derivatives) const override;
  std::size_t num_params() const override { return base_.num_params(); }
  int n_up() const override { return base_.n_up(); }
  int n_down() const override { return base_.n_down(); }
  int dim() const override { return base_.dim(); }
  const Mat& inverse_metric() const override { return base_.inverse_metric(); }

  const Ansatz& base() const { return base_; }
  const std::vector<Isometry>& subset() const { return subset_; }

 private:
  Ansatz base_;
  std::vector<Isometry> subset_;
};

// Smoothed canonicalization:
// psi^SC(x) = (1/n) sum_k sum_{h in boundary(x_k)} w_h(x_k) psi(h x).
class SmoothedCanonical : public Wavefunction {
 public:
  SmoothedCanonical(Ansatz base, SpaceGroup group, FundamentalRegion region, SmoothingSpec spec);

  WavefunctionEval evaluate(const Configuration& c, EvalLevel level = EvalLevel::derivatives) const override;
  std::size_t num_params() const override { return base_.num_params(); }
  int n_up() const override { return base_.n_up(); }
  int n_down() const override { return base_.n_down(); }
  int dim() const override { return base_.dim(); }
  const Mat& inverse_metric() const override { return base_.inverse_metric(); }

  const Ansatz& base() const { return base_; }
  const SpaceGroup& group() const { return group_; }
  const FundamentalRegion& region() const { return region_; }
  const SmoothingSpec& spec() const { return spec_; }

 private:
  Ansatz base_;
  SpaceGroup group_;
  FundamentalRegion region_;
  SmoothingSpec spec_;
};

WavefunctionEval ga_wavefunction(const Ansatz& base, std::span<const Isometry> subset, const Configuration& c,
                                 EvalLevel level = EvalLevel::derivatives);
WavefunctionEval sc_wavefunction(const Ansatz& base, const SpaceGroup& group, const FundamentalRegion& region,
                                 const SmoothingSpec& spec, const Configuration& c,
                                 EvalLevel level = EvalLevel::derivatives);

// g(c) with g uniform on the group.
Configuration da_transform(const SpaceGroup& group, const Configuration& c, Rng& rng);
// k distinct element indices, uniform without replacement; fixed by (seed, step).
std::vector<std::size_t> gas_subsample(const SpaceGroup& group, std::size_t k, std::uint64_t step,
                                       std::uint64_t seed);

}  // namespace diagsym
