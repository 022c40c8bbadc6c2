#include "diagsym/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diagsym {

namespace {

Vec mean_vec(const std::vector<Vec>& xs) {
  Vec m = Vec::Zero(xs.front().size());
  for (const auto& x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

double lambda_max(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<Vec> resample(const std::vector<Vec>& xs, const std::vector<std::size_t>& idx) {
  std::vector<Vec> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(xs[i]);
  return out;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

Vec stddev_columns(const std::vector<Vec>& xs) {
  const Mat c = sample_covariance(xs);
  return c.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Vec fixed_baseline_F(const UpdateContext& ctx, const Wavefunction& psi, const Configuration& x) {
  return grad_estimator_F(ctx.hamiltonian, psi, x, *ctx.baseline);
}

void require_exact_fixture(const UpdateContext& ctx, const char* what) {
  if (!ctx.exact_sampling) throw ConfigError(std::string(what) + " needs exact sampling (an invariant target without MCMC bias)");
  if (!ctx.baseline) throw ConfigError(std::string(what) + " needs a fixed baseline so F is a function of X alone");
}

}  // namespace

Mat sample_covariance(const std::vector<Vec>& xs) {
  if (xs.size() < 2) throw ConfigError("covariance needs at least two replicates");
  const Vec m = mean_vec(xs);
  Mat c = Mat::Zero(m.size(), m.size());
  for (const auto& x : xs) {
    const Vec d = x - m;
    c.noalias() += d * d.transpose();
  }
  return c / static_cast<double>(xs.size() - 1);
}

std::vector<Vec> update_replicates(UpdateMethod method, const UpdateContext& ctx, std::size_t replicates,
                                   std::uint64_t seed) {
  std::vector<Vec> out;
  out.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t s = stream_seed(seed, "replicate", r);
    UpdateEstimate e = method == UpdateMethod::gas ? update_gas(ctx, s, r) : run_update(method, ctx, s);
    if (!e.delta.allFinite()) throw NumericalError("non-finite update in replicate " + std::to_string(r));
    out.push_back(std::move(e.delta));
  }
  return out;
}

UpdateStats summarize_updates(UpdateMethod method, const std::vector<Vec>& reps, std::uint64_t seed, int bootstrap) {
  if (reps.size() < 2) throw ConfigError("update statistics need at least 2 replicates");
  UpdateStats st;
  st.method = method;
  st.replicates = reps.size();
  st.reliable = reps.size() >= 50;
  st.mean = mean_vec(reps);
  st.covariance = sample_covariance(reps);
  st.variance = st.covariance.diagonal();
  const double rq = 1.0 / std::sqrt(static_cast<double>(st.mean.size()));
  st.norm = rq * lambda_max(st.covariance);
  st.diag_max_norm = rq * st.variance.maxCoeff();
  Rng rng = make_rng(seed, "bootstrap-norm");
  std::vector<double> bn, bd;
  for (int b = 0; b < bootstrap; ++b) {
    const Mat c = sample_covariance(resample(reps, bootstrap_indices(reps.size(), rng)));
    bn.push_back(rq * lambda_max(c));
    bd.push_back(rq * c.diagonal().maxCoeff());
  }
  st.norm_stderr = stddev(bn);
  st.diag_max_stderr = stddev(bd);
  return st;
}

UpdateStats update_distribution(UpdateMethod method, const UpdateContext& ctx, std::size_t replicates,
                                std::uint64_t seed) {
  return summarize_updates(method, update_replicates(method, ctx, replicates, seed), seed);
}

void require_invariant_density(const Wavefunction& psi, const SpaceGroup& group, std::uint64_t seed, int points,
                               double tol) {
  Rng rng = make_rng(seed, "invariance-probe");
  Configuration c{Mat(psi.n_electrons(), psi.dim()), psi.spin_layout()};
  for (int p = 0; p < points; ++p) {
    for (Eigen::Index i = 0; i < c.positions.size(); ++i) c.positions.data()[i] = uniform01(rng);
    const auto e = psi.evaluate(c, EvalLevel::value);
    if (e.is_node()) continue;
    for (std::size_t g = 0; g < group.order(); ++g) {
      const auto eg = psi.evaluate(apply_diagonal(group[g], c), EvalLevel::value);
      if (eg.is_node() || std::abs(eg.log_abs - e.log_abs) > tol)
        throw ConfigError("fixture density is not invariant under group element " + std::to_string(g));
    }
  }
}

Mat conditional_mean_covariance(const UpdateContext& ctx, std::size_t samples, std::uint64_t seed,
                                std::vector<Vec>* per_sample) {
  require_exact_fixture(ctx, "conditional variance");
  ExactSampler1D sampler(ctx.base);
  Rng rng = make_rng(seed, "nested");
  std::vector<Vec> m;
  m.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const Configuration x = sampler.draw(rng);
    Vec acc = Vec::Zero(static_cast<Eigen::Index>(ctx.base.num_params()));
    for (const auto& g : ctx.group.elements()) acc += fixed_baseline_F(ctx, ctx.base, apply_diagonal(g, x));
    m.push_back(acc / static_cast<double>(ctx.group.order()));
  }
  Mat c = sample_covariance(m);
  if (per_sample) *per_sample = std::move(m);
  return c;
}

Prop41Report prop41_check(const UpdateContext& ctx, std::size_t replicates, std::uint64_t seed,
                          std::size_t nested_samples) {
  require_exact_fixture(ctx, "prop41_check");
  require_invariant_density(ctx.base, ctx.group, seed);
  Prop41Report rep;
  rep.replicates = replicates;
  rep.batch = ctx.batch;
  rep.k = ctx.k;
  const auto og = update_replicates(UpdateMethod::og, ctx, replicates, seed);
  const auto da = update_replicates(UpdateMethod::da, ctx, replicates, seed);
  std::vector<Vec> nested;
  const Mat cond = conditional_mean_covariance(ctx, nested_samples, seed, &nested);
  const double factor = static_cast<double>(ctx.k - 1) / static_cast<double>(ctx.batch);

  const Mat cov_og = sample_covariance(og), cov_da = sample_covariance(da);
  const double r = static_cast<double>(replicates);
  rep.mean_diff = mean_vec(da) - mean_vec(og);
  rep.mean_sigma = ((cov_da.diagonal() + cov_og.diagonal()) / r).cwiseMax(0.0).cwiseSqrt();
  rep.excess_matrix = cov_da - cov_og;
  rep.excess = rep.excess_matrix.diagonal();
  rep.predicted = factor * cond.diagonal();
  rep.min_eigenvalue = lambda_min(rep.excess_matrix);

  Rng rng = make_rng(seed, "bootstrap-prop41");
  std::vector<Vec> diffs;
  std::vector<double> mins;
  for (int b = 0; b < 200; ++b) {
    const auto idx = bootstrap_indices(replicates, rng);
    const Mat ex = sample_covariance(resample(da, idx)) - sample_covariance(resample(og, idx));
    const Mat pc = factor * sample_covariance(resample(nested, bootstrap_indices(nested.size(), rng)));
    diffs.push_back(ex.diagonal() - pc.diagonal());
    mins.push_back(lambda_min(ex));
  }
  rep.excess_sigma = stddev_columns(diffs);
  rep.min_eigenvalue_sigma = stddev(mins);

  const double floor_tol = 1e-14;
  rep.mean_ok = ((rep.mean_diff.cwiseAbs() - 3.0 * rep.mean_sigma).array() <= floor_tol).all();
  rep.excess_ok = (((rep.excess - rep.predicted).cwiseAbs() - 3.0 * rep.excess_sigma).array() <= floor_tol).all();
  rep.eigen_ok = rep.min_eigenvalue >= -3.0 * rep.min_eigenvalue_sigma - floor_tol;
  return rep;
}

Lemma42Report lemma42_check(const UpdateContext& ctx, std::size_t replicates, std::uint64_t seed,
                            std::size_t single_draws) {
  require_exact_fixture(ctx, "lemma42_check");
  if (ctx.k == 0 || ctx.batch % ctx.k != 0) throw ConfigError("batch must be a multiple of k");
  const double per = static_cast<double>(ctx.batch / ctx.k);
  const auto reps = update_replicates(UpdateMethod::ga, ctx, replicates, seed);
  const GroupAveraged psi(ctx.base, ctx.subset.empty() ? ctx.group.elements() : ctx.group.subset(ctx.subset));
  ExactSampler1D sampler(psi);
  Rng rng = make_rng(seed, "single-draw");
  std::vector<Vec> single;
  single.reserve(single_draws);
  for (std::size_t s = 0; s < single_draws; ++s) single.push_back(fixed_baseline_F(ctx, psi, sampler.draw(rng)));

  Lemma42Report rep;
  rep.replicates = replicates;
  rep.scaled_replicate_variance = per * sample_covariance(reps).diagonal();
  rep.single_draw_variance = sample_covariance(single).diagonal();
  Rng brng = make_rng(seed, "bootstrap-lemma42");
  std::vector<Vec> diffs;
  for (int b = 0; b < 200; ++b) {
    const Vec a = per * sample_covariance(resample(reps, bootstrap_indices(reps.size(), brng))).diagonal();
    const Vec c = sample_covariance(resample(single, bootstrap_indices(single.size(), brng))).diagonal();
    diffs.push_back(a - c);
  }
  rep.sigma = stddev_columns(diffs);
  rep.ok = (((rep.scaled_replicate_variance - rep.single_draw_variance).cwiseAbs() - 3.0 * rep.sigma).array() <= 1e-14)
               .all();
  return rep;
}

namespace {

// Calls fn(weight, outcome digits) for every outcome of a mixed-radix counter.
template <class Fn>
void enumerate(const std::vector<std::size_t>& radix, Fn&& fn) {
  std::vector<std::size_t> digit(radix.size(), 0);
  while (true) {
    fn(digit);
    std::size_t i = 0;
    while (i < radix.size() && ++digit[i] == radix[i]) digit[i++] = 0;
    if (i == radix.size()) return;
  }
}

}  // namespace

DiscreteProp41 discrete_prop41(const DiscreteToy& toy, int batch, int k) {
  if (k < 1 || batch < 1 || batch % k != 0) throw ConfigError("batch must be a positive multiple of k");
  const std::size_t np = toy.probability.size(), ng = toy.action.size();
  const auto n = static_cast<std::size_t>(batch), m = n / static_cast<std::size_t>(k);
  const Rational nr(batch);
  DiscreteProp41 out;

  Rational s1 = 0, s2 = 0;
  enumerate(std::vector<std::size_t>(n, np), [&](const std::vector<std::size_t>& xs) {
    Rational p = 1, sum = 0;
    for (std::size_t x : xs) {
      p *= toy.probability[x];
      sum += toy.f[x];
    }
    const Rational delta = sum / nr;
    s1 += p * delta;
    s2 += p * delta * delta;
  });
  out.mean_og = s1;
  out.var_og = s2 - s1 * s1;

  // m samples, then k group draws per sample (uniform on the group)
  std::vector<std::size_t> radix(m, np);
  radix.resize(m + n, ng);
  const Rational pg(1, static_cast<long long>(ng));
  s1 = 0;
  s2 = 0;
  enumerate(radix, [&](const std::vector<std::size_t>& d) {
    Rational p = 1, sum = 0;
    for (std::size_t i = 0; i < m; ++i) p *= toy.probability[d[i]];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
        p *= pg;
        sum += toy.f[toy.action[d[m + i * static_cast<std::size_t>(k) + j]][d[i]]];
      }
    const Rational delta = sum / nr;
    s1 += p * delta;
    s2 += p * delta * delta;
  });
  out.mean_da = s1;
  out.var_da = s2 - s1 * s1;
  out.excess = out.var_da - out.var_og;

  Rational c1 = 0, c2 = 0;
  for (std::size_t x = 0; x < np; ++x) {
    Rational cm = 0;
    for (std::size_t g = 0; g < ng; ++g) cm += toy.f[toy.action[g][x]];
    cm *= pg;
    c1 += toy.probability[x] * cm;
    c2 += toy.probability[x] * cm * cm;
  }
  out.conditional_variance = c2 - c1 * c1;
  out.predicted = Rational(k - 1, batch) * out.conditional_variance;
  return out;
}

DiscreteToy two_point_toy() {
  return {{Rational(1, 2), Rational(1, 2)}, {{0, 1}, {1, 0}}, {Rational(1), Rational(0)}};
}

DiscreteToy two_orbit_toy() {
  return {{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)},
          {{0, 1, 2, 3}, {1, 0, 3, 2}},
          {Rational(3), Rational(1), Rational(0), Rational(0)}};
}

std::vector<Vec> synthetic_replicates(UpdateMethod method, const SyntheticFixture& fx, std::size_t batch,
                                      std::size_t k, std::size_t replicates, std::uint64_t seed) {
  if (k == 0 || ((method == UpdateMethod::da || method == UpdateMethod::ga) && batch % k != 0))
    throw ConfigError("batch must be a multiple of k");
  const auto q = static_cast<Eigen::Index>(fx.q);
  const double ord = static_cast<double>(fx.order);
  auto f_at = [&](const Vec& x, double shift) {
    Vec f(q);
    for (Eigen::Index l = 0; l < q; ++l) f[l] = wrap_unit(x[l] + shift) < fx.p ? 1.0 : 0.0;
    return f;
  };
  std::vector<Vec> out;
  out.reserve(replicates);
  std::uniform_int_distribution<std::size_t> pick(0, fx.order - 1);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = make_rng(seed, "synthetic", r);
    auto draw_x = [&] {
      Vec x(q);
      for (Eigen::Index l = 0; l < q; ++l) x[l] = uniform01(rng);
      return x;
    };
    Vec acc = Vec::Zero(q);
    std::size_t terms = 0;
    switch (method) {
      case UpdateMethod::og:
        for (std::size_t i = 0; i < batch; ++i, ++terms) acc += f_at(draw_x(), 0.0);
        break;
      case UpdateMethod::da:
        for (std::size_t i = 0; i < batch / k; ++i) {
          const Vec x = draw_x();
          for (std::size_t j = 0; j < k; ++j, ++terms) acc += f_at(x, static_cast<double>(pick(rng)) / ord);
        }
        break;
      case UpdateMethod::ga:
        for (std::size_t i = 0; i < batch / k; ++i, ++terms) {
          const Vec x = draw_x();
          Vec fg = Vec::Zero(q);
          for (std::size_t g = 0; g < fx.order; ++g) fg += f_at(x, static_cast<double>(g) / ord);
          acc += fg / ord;
        }
        break;
      case UpdateMethod::gas: {
        std::vector<std::size_t> idx(fx.order);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(std::min(k, fx.order));
        for (std::size_t i = 0; i < batch; ++i, ++terms) {
          const Vec x = draw_x();
          Vec fg = Vec::Zero(q);
          for (std::size_t g : idx) fg += f_at(x, static_cast<double>(g) / ord);
          acc += fg / static_cast<double>(idx.size());
        }
        break;
      }      case UpdateMethod::sc:
        throw ConfigError("the synthetic fixture has no smoothed-canonical form");
    }
    out.push_back(acc / static_cast<double>(terms));
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_fitted_normal(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  const double sd = stddev(v);
  if (!(sd > 0.0)) return 1.0;  // a point mass is as far from normal as it gets
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return ks_distance(std::move(v), [&](double x) { return normal_cdf((x - m) / sd); });
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double max_coordinate_ks(const std::vector<Vec>& reps, std::uint64_t seed, std::size_t reference_draws) {
  const Vec m = mean_vec(reps);
  const Mat cov = sample_covariance(reps);
  std::vector<double> stat;
  stat.reserve(reps.size());
  for (const auto& r : reps) stat.push_back((r - m).cwiseAbs().maxCoeff());
  if (m.size() == 1) {
    // a single coordinate: the folded fitted normal, in closed form
    const double sd = std::sqrt(cov(0, 0));
    if (!(sd > 0.0)) return 1.0;
    return ks_distance(std::move(stat), [&](double x) { return x <= 0 ? 0.0 : 2.0 * normal_cdf(x / sd) - 1.0; });
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  const Mat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Rng rng = make_rng(seed, "max-of-gaussians");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> ref;
  ref.reserve(reference_draws);
  Vec z(m.size());
  for (std::size_t s = 0; s < reference_draws; ++s) {
    for (Eigen::Index l = 0; l < z.size(); ++l) z[l] = normal(rng);
    ref.push_back((root * z).cwiseAbs().maxCoeff());
  }
  return ks_two_sample(std::move(stat), std::move(ref));
}

CltPoint clt_point(const std::vector<Vec>& reps, std::uint64_t seed, int bootstrap) {
  CltPoint pt;
  const auto q = reps.front().size();
  auto column = [&](const std::vector<Vec>& rs, Eigen::Index l) {
    std::vector<double> c;
    c.reserve(rs.size());
    for (const auto& r : rs) c.push_back(r[l]);
    return c;
  };
  Rng rng = make_rng(seed, "bootstrap-clt");
  std::vector<std::vector<double>> boot(static_cast<std::size_t>(q));
  std::vector<double> boot_max;
  for (int b = 0; b < bootstrap; ++b) {
    const auto rs = resample(reps, bootstrap_indices(reps.size(), rng));
    for (Eigen::Index l = 0; l < q; ++l) boot[static_cast<std::size_t>(l)].push_back(ks_fitted_normal(column(rs, l)));
    boot_max.push_back(max_coordinate_ks(rs, seed, 2000));
  }
  double skew = 0.0;
  for (Eigen::Index l = 0; l < q; ++l) {
    const auto c = column(reps, l);
    pt.ks.push_back(ks_fitted_normal(c));
    pt.ks_sigma.push_back(stddev(boot[static_cast<std::size_t>(l)]));
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    const double sd = stddev(c);
    double m3 = 0.0;
    for (double x : c) m3 += (x - m) * (x - m) * (x - m);
    m3 /= static_cast<double>(c.size());
    skew += sd > 0.0 ? std::abs(m3) / (sd * sd * sd) : 0.0;
  }
  pt.skewness = skew / static_cast<double>(q);
  pt.max_ks = max_coordinate_ks(reps, seed);
  pt.max_ks_sigma = stddev(boot_max);
  return pt;
}

CltReport clt_check(UpdateMethod method, const SyntheticFixture& fx, std::span<const std::size_t> batches,
                    std::size_t k, std::size_t replicates, std::uint64_t seed) {
  CltReport rep;
  rep.method = method;
  rep.replicates = replicates;
  for (std::size_t n : batches) {
    const auto reps = synthetic_replicates(method, fx, n, k, replicates, stream_seed(seed, "clt-batch", n));
    CltPoint pt = clt_point(reps, seed);
    pt.batch = n;
    rep.points.push_back(std::move(pt));
  }
  rep.monotone = true;
  for (std::size_t j = 1; j < rep.points.size(); ++j) {
    const auto& a = rep.points[j - 1];
    const auto& b = rep.points[j];
    for (std::size_t l = 0; l < a.ks.size(); ++l)
      if (b.ks[l] > a.ks[l] + 3.0 * std::hypot(a.ks_sigma[l], b.ks_sigma[l])) rep.monotone = false;
    if (b.max_ks > a.max_ks + 3.0 * std::hypot(a.max_ks_sigma, b.max_ks_sigma)) rep.monotone = false;
  }
  if (rep.points.size() >= 2) {
    rep.strict_first_last = true;
    const auto& a = rep.points.front();
    const auto& b = rep.points.back();
    for (std::size_t l = 0; l < a.ks.size(); ++l)
      if (!(a.ks[l] > b.ks[l])) rep.strict_first_last = false;
  }
  return rep;
}

std::vector<BlowupRow> blowup_probe(std::span<const double> epsilons, SmoothingKind kind,
                                    const BlowupFixture* fixture, int grid) {
  std::vector<BlowupRow> rows;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw ConfigError("blowup_probe: epsilon must be positive");
    BlowupRow row{eps, kind};
    const SmoothingSpec spec{kind, eps};
    for (int i = 0; i < grid; ++i) {
      const double w = eps * static_cast<double>(i) / static_cast<double>(grid - 1);
      const Derivs d = lambda_eps_derivs(spec, w);
      row.max_first = std::max(row.max_first, std::abs(d.first));
      row.max_second = std::max(row.max_second, std::abs(d.second));
    }
    if (fixture) {
      if (fixture->base.n_electrons() != 1 || fixture->base.dim() != 1)
        throw ConfigError("the blowup scan fixture must have one electron in one dimension");
      const SmoothedCanonical sc(fixture->base, fixture->group, fixture->region, spec);
      Configuration c{Mat(1, 1), fixture->base.spin_layout()};
      for (double centre : fixture->scan_centres) {
        for (int i = 0; i < fixture->scan_points; ++i) {
          const double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(fixture->scan_points - 1);
          c.positions(0, 0) = centre + fixture->scan_halfwidth * t;
          // reference: hard canonicalization, base evaluated at the closest image h(x)
          const auto members = boundary_set(fixture->region, spec, fixture->group, c.positions.row(0).transpose());
          const auto best = std::min_element(members.begin(), members.end(), [](const auto& a, const auto& b) {
            return a.distance < b.distance;
          });
          const Configuration hc = apply_diagonal(fixture->group[best->element], c);
          const auto eb = fixture->base.evaluate(hc);
          const auto es = sc.evaluate(c);
          if (eb.is_node() || es.is_node()) continue;
          row.energy_deviation = std::max(row.energy_deviation, std::abs(local_energy(fixture->hamiltonian, c, es) -
                                                                         local_energy(fixture->hamiltonian, hc, eb)));
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace diagsym
