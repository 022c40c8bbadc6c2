#include "diagsym/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace diagsym {

namespace {

// Sum of signed terms t_j = coef_j * sign_j * exp(log_j) together with the
// derivative accumulators, all scaled by exp(-ref).
struct LogSum {
  double ref = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  Mat grad;
  double lap = 0.0;
  Vec gparams;
};

WavefunctionEval finish(LogSum& acc, double norm, bool derivs) {
  if (!(std::abs(acc.value) > 0.0) || !std::isfinite(acc.ref)) return WavefunctionEval{};
  WavefunctionEval out;
  out.log_abs = acc.ref + std::log(std::abs(acc.value) / norm);
  out.sign = acc.value > 0 ? 1 : -1;
  if (derivs) {
    out.grad_x = acc.grad / acc.value;
    out.laplacian_over_psi = acc.lap / acc.value;
    out.grad_params = acc.gparams / acc.value;
  }
  return out;
}

}  // namespace

GroupAveraged::GroupAveraged(Ansatz base, std::vector<Isometry> subset)
    : base_(std::move(base)), subset_(std::move(subset)) {
  if (subset_.empty()) throw ConfigError("group average over an empty subset");
  for (const auto& g : subset_)
    if (g.dim() != base_.dim()) throw ConfigError("subset element dimension does not match the ansatz");
}

WavefunctionEval GroupAveraged::evaluate(const Configuration& c, EvalLevel level) const {
  return ga_wavefunction(base_, subset_, c, level);
}

WavefunctionEval ga_wavefunction(const Ansatz& base, std::span<const Isometry> subset, const Configuration& c,
                                 EvalLevel level) {
  const bool derivs = level == EvalLevel::derivatives;
  std::vector<WavefunctionEval> terms;
  terms.reserve(subset.size());
  LogSum acc;
  for (const auto& g : subset) {
    terms.push_back(base.evaluate(apply_diagonal(g, c), level));
    if (!terms.back().is_node()) acc.ref = std::max(acc.ref, terms.back().log_abs);
  }
  if (derivs) {
    acc.grad = Mat::Zero(c.size(), c.dim());
    acc.gparams = Vec::Zero(static_cast<Eigen::Index>(base.num_params()));
  }
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto& t = terms[j];
    // A branch sitting on a node of psi contributes nothing (measure-zero set).
    if (t.is_node()) continue;
    const double v = t.sign * std::exp(t.log_abs - acc.ref);
    acc.value += v;
    if (!derivs) continue;
    const Mat& a = subset[j].rotation;
    acc.grad += v * (t.grad_x * a);  // row i: (A^T g_i)^T
    acc.lap += v * t.laplacian_over_psi;
    acc.gparams += v * t.grad_params;
  }
  return finish(acc, static_cast<double>(subset.size()), derivs);
}

SmoothedCanonical::SmoothedCanonical(Ansatz base, SpaceGroup group, FundamentalRegion region, SmoothingSpec spec)
    : base_(std::move(base)), group_(std::move(group)), region_(std::move(region)), spec_(spec) {
  if (group_.dim() != base_.dim() || region_.dim() != base_.dim())
    throw ConfigError("group, region and ansatz dimensions differ");
  check_region_compatible(region_, spec_);
}

WavefunctionEval SmoothedCanonical::evaluate(const Configuration& c, EvalLevel level) const {
  return sc_wavefunction(base_, group_, region_, spec_, c, level);
}

WavefunctionEval sc_wavefunction(const Ansatz& base, const SpaceGroup& group, const FundamentalRegion& region,
                                 const SmoothingSpec& spec, const Configuration& c, EvalLevel level) {
  const bool derivs = level == EvalLevel::derivatives;
  const int n = c.size(), d = c.dim();
  const Mat& minv = base.inverse_metric();

  struct WeightTerm {
    int electron;
    std::size_t element;
    double w;
    Vec gw;     // gradient of the normalised weight in x_k
    double lw;  // Laplacian of the normalised weight
  };
  std::vector<WeightTerm> wterms;
  std::map<std::size_t, WavefunctionEval> branch;

  for (int k = 0; k < n; ++k) {
    const Vec x = c.positions.row(k).transpose();
    const auto members = boundary_set(region, spec, group, x);
    if (!derivs) {
      for (const auto& m : members)
        if (m.weight > 0.0) wterms.push_back({k, m.element, m.weight, Vec(), 0.0});
      continue;
    }
    // Raw weights lambda_h and derivatives; normalise by S = sum lambda_h.
    struct Raw {
      std::size_t element;
      double lam;
      Vec glam;
      double llam;
    };
    std::vector<Raw> raw;
    double s = 0.0, ls = 0.0;
    Vec gs = Vec::Zero(d);
    for (const auto& m : members) {
      const Isometry& g = group[m.element];
      const Isometry h{g.rotation, g.translation + m.shift};
      // distance of h(x) to the region equals that of x to h^{-1}(region)
      const Isometry hi{g.rotation.inverse().array().round().matrix(), Vec()};
      const Isometry hinv{hi.rotation, -(hi.rotation * h.translation)};
      const DistanceEval de = distance_to_region_derivs(region, spec.kind, x, hinv, minv);
      const Derivs lam = lambda_eps_derivs(spec, de.value);
      Raw r{m.element, lam.value, lam.first * de.gradient,
            lam.second * de.gradient.dot(minv * de.gradient) + lam.first * de.laplacian};
      s += r.lam;
      gs += r.glam;
      ls += r.llam;
      raw.push_back(std::move(r));
    }
    for (const auto& r : raw) {
      if (!(r.lam > 0.0)) continue;
      const double w = r.lam / s;
      const Vec gw = r.glam / s - r.lam * gs / (s * s);
      const double lw = r.llam / s - 2.0 * r.glam.dot(minv * gs) / (s * s) - r.lam * ls / (s * s) +
                        2.0 * r.lam * gs.dot(minv * gs) / (s * s * s);
      wterms.push_back({k, r.element, w, gw, lw});
    }
  }

  LogSum acc;
  for (const auto& t : wterms) {
    auto it = branch.find(t.element);
    if (it == branch.end()) it = branch.emplace(t.element, base.evaluate(apply_diagonal(group[t.element], c), level)).first;
    if (!it->second.is_node()) acc.ref = std::max(acc.ref, it->second.log_abs);
  }
  if (derivs) {
    acc.grad = Mat::Zero(n, d);
    acc.gparams = Vec::Zero(static_cast<Eigen::Index>(base.num_params()));
  }
  for (const auto& t : wterms) {
    const WavefunctionEval& b = branch.at(t.element);
    if (b.is_node()) continue;
    const double pv = b.sign * std::exp(b.log_abs - acc.ref);
    acc.value += t.w * pv;
    if (!derivs) continue;
    const Mat& a = group[t.element].rotation;
    const Mat gb = b.grad_x * a;  // branch gradient mapped back to x
    acc.grad += t.w * pv * gb;
    acc.grad.row(t.electron) += pv * t.gw.transpose();
    const Vec gk = gb.row(t.electron).transpose();
    acc.lap += pv * (t.lw + 2.0 * t.gw.dot(minv * gk) + t.w * b.laplacian_over_psi);
    acc.gparams += t.w * pv * b.grad_params;
  }
  return finish(acc, static_cast<double>(n), derivs);
}

Configuration da_transform(const SpaceGroup& group, const Configuration& c, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, group.order() - 1);
  return apply_diagonal(group[pick(rng)], c);
}

std::vector<std::size_t> gas_subsample(const SpaceGroup& group, std::size_t k, std::uint64_t step,
                                       std::uint64_t seed) {
  if (k == 0 || k > group.order())
    throw ConfigError("subsample size k = " + std::to_string(k) + " must lie in [1, " + std::to_string(group.order()) +
                      "]");
  Rng rng = make_rng(seed, "gas-subsample", step);
  std::vector<std::size_t> idx(group.order());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // partial Fisher-Yates: the first k entries are a uniform draw without replacement
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace diagsym
