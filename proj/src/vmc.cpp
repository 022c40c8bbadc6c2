#include "diagsym/vmc.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace diagsym {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Configuration uniform_config(const Wavefunction& psi, Rng& rng) {
  Configuration c;
  c.positions.resize(psi.n_electrons(), psi.dim());
  for (Eigen::Index i = 0; i < c.positions.size(); ++i) c.positions.data()[i] = uniform01(rng);
  c.spins = psi.spin_layout();
  return c;
}

double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace

ChainState random_chain(const Wavefunction& psi, std::uint64_t seed, std::size_t chain) {
  ChainState st{Configuration{}, 0.0, make_rng(seed, "chain", chain)};
  for (int attempt = 0; attempt < 10000; ++attempt) {
    st.config = uniform_config(psi, st.rng);
    const auto e = psi.evaluate(st.config, EvalLevel::value);
    if (!e.is_node()) {
      st.log_prob = 2.0 * e.log_abs;
      return st;
    }
  }
  throw NumericalError("could not find a starting configuration off the nodes of the wavefunction");
}

void refresh(const Wavefunction& psi, ChainState& chain) {
  const auto e = psi.evaluate(chain.config, EvalLevel::value);
  chain.log_prob = e.is_node() ? -std::numeric_limits<double>::infinity() : 2.0 * e.log_abs;
}

bool metropolis_step(const Wavefunction& psi, ChainState& chain, double step_size) {
  std::normal_distribution<double> normal(0.0, step_size);
  Configuration prop = chain.config;
  for (Eigen::Index i = 0; i < prop.positions.size(); ++i)
    prop.positions.data()[i] = wrap_unit(prop.positions.data()[i] + normal(chain.rng));
  const double u = uniform01(chain.rng);
  ++chain.proposed;
  const auto e = psi.evaluate(prop, EvalLevel::value);
  if (e.is_node()) return false;
  const double lp = 2.0 * e.log_abs;
  if (std::log(u) < lp - chain.log_prob) {
    chain.config = std::move(prop);
    chain.log_prob = lp;
    ++chain.accepted;
    return true;
  }
  return false;
}

void advance(const Wavefunction& psi, ChainState& chain, int steps, double step_size) {
  for (int s = 0; s < steps; ++s) metropolis_step(psi, chain, step_size);
}

std::vector<Configuration> sample_batch(const Wavefunction& psi, std::size_t n, int m, int burn_in, double step_size,
                                        std::uint64_t seed) {
  if (m < 0 || burn_in < 0) throw ConfigError("sampler steps must be non-negative");
  std::vector<Configuration> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ChainState st = random_chain(psi, seed, i);
    advance(psi, st, burn_in + m, step_size);
    out.push_back(std::move(st.config));
  }
  return out;
}

SampleSet sample_inference(const Wavefunction& psi, std::size_t chains, std::size_t per_chain, int thin, int burn_in,
                           double step_size, std::uint64_t seed) {
  if (thin < 1) throw ConfigError("thinning interval must be >= 1");
  SampleSet set;
  set.samples.reserve(chains * per_chain);
  std::size_t acc = 0, prop = 0;
  for (std::size_t c = 0; c < chains; ++c) {
    ChainState st = random_chain(psi, seed, c);
    advance(psi, st, burn_in, step_size);
    st.accepted = st.proposed = 0;
    for (std::size_t s = 0; s < per_chain; ++s) {
      advance(psi, st, thin, step_size);
      set.samples.push_back(st.config);
    }
    acc += st.accepted;
    prop += st.proposed;
  }
  set.acceptance = prop ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
  return set;
}

ExactSampler1D::ExactSampler1D(const Wavefunction& psi, int grid, double margin) : psi_(&psi) {
  if (psi.dim() != 1 || psi.n_electrons() != 1)
    throw ConfigError("exact sampling is only available for one electron in one dimension");
  spins_ = psi.spin_layout();
  double best = -std::numeric_limits<double>::infinity();
  Configuration c{Mat(1, 1), spins_};
  for (int j = 0; j < grid; ++j) {
    c.positions(0, 0) = (j + 0.5) / grid;
    const auto e = psi.evaluate(c, EvalLevel::value);
    if (!e.is_node()) best = std::max(best, 2.0 * e.log_abs);
  }
  if (!std::isfinite(best)) throw NumericalError("wavefunction vanishes on the sampling grid");
  log_envelope_ = best + std::log(margin);
}

Configuration ExactSampler1D::draw(Rng& rng) const {
  Configuration c{Mat(1, 1), spins_};
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    c.positions(0, 0) = uniform01(rng);
    const double u = uniform01(rng);
    const auto e = psi_->evaluate(c, EvalLevel::value);
    if (e.is_node()) continue;
    const double lp = 2.0 * e.log_abs;
    if (lp > log_envelope_) throw NumericalError("rejection envelope too low for the exact sampler");
    if (std::log(u) < lp - log_envelope_) return c;
  }
  throw NumericalError("exact sampler failed to accept a point");
}

Vec grad_estimator_F(const Hamiltonian& h, const Wavefunction& psi, const Configuration& c, double baseline) {
  const auto e = psi.evaluate(c, EvalLevel::derivatives);
  return 2.0 * (local_energy(h, c, e) - baseline) * e.grad_params;
}

std::string to_string(UpdateMethod m) {
  switch (m) {
    case UpdateMethod::og: return "og";
    case UpdateMethod::da: return "da";
    case UpdateMethod::ga: return "ga";
    case UpdateMethod::gas: return "gas";
    case UpdateMethod::sc: return "sc";
  }
  return "?";
}

UpdateMethod update_method_from_string(std::string_view name) {
  if (name == "og") return UpdateMethod::og;
  if (name == "da") return UpdateMethod::da;
  if (name == "ga") return UpdateMethod::ga;
  if (name == "gas") return UpdateMethod::gas;
  if (name == "sc") return UpdateMethod::sc;
  throw ConfigError("unknown training method '" + std::string(name) + "' (expected og, da, ga, gas or sc)");
}

namespace {

std::vector<Configuration> draw(const Wavefunction& psi, std::size_t count, const UpdateContext& ctx,
                                std::uint64_t seed) {
  if (ctx.exact_sampling) {
    ExactSampler1D sampler(psi);
    Rng rng = make_rng(seed, "exact-sampler");
    std::vector<Configuration> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.draw(rng));
    return out;
  }
  return sample_batch(psi, count, ctx.sampler.steps, ctx.sampler.burn_in, ctx.sampler.step_size, seed);
}

struct Evaluated {
  double el;
  Vec grad;
};

UpdateEstimate assemble(const std::vector<Evaluated>& ev, std::optional<double> baseline, std::size_t nodes,
                        std::size_t nparams) {
  UpdateEstimate out;
  out.node_resamples = nodes;
  out.delta = Vec::Zero(static_cast<Eigen::Index>(nparams));
  if (ev.empty()) throw NumericalError("no usable samples for the update");
  double mean = 0.0;
  for (const auto& e : ev) mean += e.el;
  mean /= static_cast<double>(ev.size());
  out.energy = mean;
  const double c = baseline.value_or(mean);
  for (const auto& e : ev) out.delta += 2.0 * (e.el - c) * e.grad;
  out.delta /= static_cast<double>(ev.size());
  return out;
}

std::size_t per_orbit(const UpdateContext& ctx) {
  if (ctx.k == 0 || ctx.batch % ctx.k != 0)
    throw ConfigError("batch size " + std::to_string(ctx.batch) + " must be a multiple of k = " + std::to_string(ctx.k));
  return ctx.batch / ctx.k;
}

UpdateEstimate plain_update(const Wavefunction& psi, std::size_t count, const UpdateContext& ctx, std::uint64_t seed) {
  const auto xs = draw(psi, count, ctx, seed);
  std::vector<Evaluated> ev;
  std::size_t nodes = 0;
  for (const auto& x : xs) {
    const auto e = psi.evaluate(x, EvalLevel::derivatives);
    if (e.is_node()) {
      ++nodes;
      continue;
    }
    ev.push_back({local_energy(ctx.hamiltonian, x, e), e.grad_params});
  }
  return assemble(ev, ctx.baseline, nodes, psi.num_params());
}

std::vector<Isometry> ga_subset(const UpdateContext& ctx) {
  if (ctx.subset.empty()) return ctx.group.elements();
  return ctx.group.subset(ctx.subset);
}

}  // namespace

UpdateEstimate update_og(const UpdateContext& ctx, std::uint64_t seed) {
  return plain_update(ctx.base, ctx.batch, ctx, seed);
}

UpdateEstimate update_da(const UpdateContext& ctx, std::uint64_t seed) {
  const std::size_t m = per_orbit(ctx);
  const auto xs = draw(ctx.base, m, ctx, seed);
  Rng rng = make_rng(seed, "da-draws");
  std::vector<Evaluated> ev;
  std::size_t nodes = 0;
  for (const auto& x : xs) {
    for (std::size_t j = 0; j < ctx.k; ++j) {
      for (int attempt = 0;; ++attempt) {
        const Configuration y = da_transform(ctx.group, x, rng);
        const auto e = ctx.base.evaluate(y, EvalLevel::derivatives);
        if (!e.is_node()) {
          ev.push_back({local_energy(ctx.hamiltonian, y, e), e.grad_params});
          break;
        }
        ++nodes;
        if (attempt > 1000) throw NumericalError("augmented samples keep landing on nodes");
      }
    }
  }
  return assemble(ev, ctx.baseline, nodes, ctx.base.num_params());
}

UpdateEstimate update_ga(const UpdateContext& ctx, std::uint64_t seed) {
  const GroupAveraged psi(ctx.base, ga_subset(ctx));
  return plain_update(psi, per_orbit(ctx), ctx, seed);
}

UpdateEstimate update_gas(const UpdateContext& ctx, std::uint64_t seed, std::uint64_t step) {
  const GroupAveraged psi(ctx.base, ctx.group.subset(gas_subsample(ctx.group, ctx.k, step, seed)));
  return plain_update(psi, ctx.batch, ctx, seed);
}

UpdateEstimate update_sc(const UpdateContext& ctx, std::uint64_t seed) {
  if (!ctx.region) throw ConfigError("sc updates need a fundamental region");
  const SmoothedCanonical psi(ctx.base, ctx.group, *ctx.region, ctx.smoothing);
  return plain_update(psi, ctx.batch, ctx, seed);
}

UpdateEstimate run_update(UpdateMethod method, const UpdateContext& ctx, std::uint64_t seed) {
  switch (method) {
    case UpdateMethod::og: return update_og(ctx, seed);
    case UpdateMethod::da: return update_da(ctx, seed);
    case UpdateMethod::ga: return update_ga(ctx, seed);
    case UpdateMethod::gas: return update_gas(ctx, seed);
    case UpdateMethod::sc: return update_sc(ctx, seed);
  }
  throw ConfigError("unknown update method");
}

double batch_means_stderr(std::span<const double> xs, int blocks) {
  const std::size_t n = xs.size();
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::max(blocks, 2)), n);
  if (b < 2) return 0.0;
  std::vector<double> means(b);
  for (std::size_t j = 0; j < b; ++j) {
    const std::size_t lo = j * n / b, hi = (j + 1) * n / b;
    means[j] = mean_of(xs.subspan(lo, hi - lo));
  }
  return std::sqrt(variance_of(means) / static_cast<double>(b));
}

EnergyMetrics evaluate_metrics(const Hamiltonian& h, const Wavefunction& psi, std::span<const Configuration> samples,
                               double acceptance) {
  std::vector<double> el;
  el.reserve(samples.size());
  for (const auto& x : samples) {
    const auto e = psi.evaluate(x, EvalLevel::derivatives);
    if (!e.is_node()) el.push_back(local_energy(h, x, e));
  }
  EnergyMetrics m;
  m.samples = el.size();
  m.energy = mean_of(el);
  m.variance = variance_of(el);
  m.stderr_energy = batch_means_stderr(el);
  m.acceptance = acceptance;
  return m;
}

RatioVariance var_pa_over_og(const Ansatz& base, std::span<const Isometry> subset,
                             std::span<const Configuration> samples) {
  std::vector<double> r;
  RatioVariance out;
  for (const auto& x : samples) {
    const auto b = base.evaluate(x, EvalLevel::value);
    if (b.is_node()) {
      ++out.skipped;
      continue;
    }
    const auto g = ga_wavefunction(base, subset, x, EvalLevel::value);
    r.push_back(g.is_node() ? 0.0 : g.sign * b.sign * std::exp(g.log_abs - b.log_abs));
  }
  out.used = r.size();
  out.value = variance_of(r);
  return out;
}

TrainResult train(const Hamiltonian& h, const Ansatz& init, const SpaceGroup& group, const TrainOptions& opt,
                  const TrainCallbacks& callbacks) {
  if (opt.steps < 0) throw ConfigError("training steps must be non-negative");
  if (opt.k == 0) throw ConfigError("k must be >= 1");
  const bool per_orbit_batch = opt.method == UpdateMethod::da || opt.method == UpdateMethod::ga;
  if (per_orbit_batch && opt.walkers % opt.k != 0)
    throw ConfigError("batch size must be a multiple of k for da and ga");
  const std::size_t nwalk = per_orbit_batch ? opt.walkers / opt.k : opt.walkers;
  if (opt.method == UpdateMethod::sc) {
    if (!opt.region) throw ConfigError("sc training needs a fundamental region");
    check_region_compatible(*opt.region, opt.smoothing);
  }
  const std::vector<Isometry> ga_set = opt.subset.empty() ? group.elements() : group.subset(opt.subset);

  TrainResult res{init, {}};
  if (callbacks.on_checkpoint) callbacks.on_checkpoint(0, res.final);
  std::vector<ChainState> chains;
  Rng da_rng = make_rng(opt.seed, "train-da-draws");
  double e0 = std::numeric_limits<double>::quiet_NaN();

  for (int step = 1; step <= opt.steps; ++step) {
    const Ansatz& base = res.final;
    std::unique_ptr<Wavefunction> sampled;
    if (opt.method == UpdateMethod::ga) {
      sampled = std::make_unique<GroupAveraged>(base, ga_set);
    } else if (opt.method == UpdateMethod::gas) {
      sampled = std::make_unique<GroupAveraged>(
          base, group.subset(gas_subsample(group, opt.k, static_cast<std::uint64_t>(step), opt.seed)));
    } else if (opt.method == UpdateMethod::sc) {
      sampled = std::make_unique<SmoothedCanonical>(base, group, *opt.region, opt.smoothing);
    } else {
      sampled = std::make_unique<Ansatz>(base);
    }
    const auto t0 = Clock::now();
    int sweeps = opt.sampler.steps;
    if (chains.empty()) {
      for (std::size_t i = 0; i < nwalk; ++i) chains.push_back(random_chain(*sampled, opt.seed, i));
      sweeps += opt.sampler.burn_in;
    }
    std::size_t acc0 = 0, prop0 = 0, acc1 = 0, prop1 = 0;
    for (auto& ch : chains) {
      refresh(*sampled, ch);
      acc0 += ch.accepted;
      prop0 += ch.proposed;
      advance(*sampled, ch, sweeps, opt.sampler.step_size);
      acc1 += ch.accepted;
      prop1 += ch.proposed;
    }
    const double t_samp = seconds_since(t0);

    const auto t1 = Clock::now();
    std::vector<double> el;
    Vec delta = Vec::Zero(static_cast<Eigen::Index>(base.num_params()));
    std::vector<Vec> grads;
    for (const auto& ch : chains) {
      if (opt.method == UpdateMethod::da) {
        for (std::size_t j = 0; j < opt.k; ++j) {
          const Configuration y = da_transform(group, ch.config, da_rng);
          const auto e = base.evaluate(y, EvalLevel::derivatives);
          if (e.is_node()) continue;
          el.push_back(local_energy(h, y, e));
          grads.push_back(e.grad_params);
        }
      } else {
        const auto e = sampled->evaluate(ch.config, EvalLevel::derivatives);
        if (e.is_node()) continue;
        el.push_back(local_energy(h, ch.config, e));
        grads.push_back(e.grad_params);
      }
    }
    if (el.empty()) throw NumericalError("all training samples were on nodes");
    const double mean = mean_of(el);
    for (std::size_t i = 0; i < el.size(); ++i) delta += 2.0 * (el[i] - mean) * grads[i];
    delta /= static_cast<double>(el.size());
    const double t_grad = seconds_since(t1);

    double lr = opt.learning_rate;
    if (opt.decay_every > 0) lr *= std::pow(opt.decay_factor, (step - 1) / opt.decay_every);

    TrainRecord rec{step,   mean, batch_means_stderr(el), variance_of(el),
                    prop1 > prop0 ? static_cast<double>(acc1 - acc0) / static_cast<double>(prop1 - prop0) : 0.0,
                    lr,     t_samp, t_grad};
    if (step == 1) e0 = mean;
    res.trace.push_back(rec);
    if (callbacks.on_step) callbacks.on_step(rec);
    if (!std::isfinite(mean) || std::abs(mean) > opt.divergence_factor * std::max(std::abs(e0), 1.0) ||
        !delta.allFinite())
      throw DivergenceError("training diverged at step " + std::to_string(step) + " (energy " + std::to_string(mean) +
                            ", initial " + std::to_string(e0) + ")");
    res.final = base.with_params(base.params() - lr * delta);
    if (callbacks.on_checkpoint && opt.checkpoint_every > 0 &&
        (step % opt.checkpoint_every == 0 || step == opt.steps))
      callbacks.on_checkpoint(step, res.final);
  }
  return res;
}

}  // namespace diagsym
