// Acceptance run: one PASS/FAIL line per criterion. Optional argv[1] is the
// scratch directory for run artifacts, argv[2] a comma-separated list of
// criterion numbers to run (default all).
#include "support/finite_diff.hpp"
#include "support/fixtures.hpp"

#include "diagsym/runner.hpp"
#include "diagsym/scan.hpp"
#include "diagsym/stats.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace diagsym;
using namespace fixtures;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

fs::path g_root;

fs::path fresh(const std::string& name) {
  const fs::path p = g_root / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunOptions quiet(const fs::path& out, std::optional<fs::path> ck = std::nullopt) { return {out, ck, true}; }

// One up and one down electron in wells at 0 and 1/2: the ground state is
// invariant under reflection and the half translation.
ExperimentConfig twin_config() {
  ExperimentConfig c;
  c.system.lattice = "chain";
  c.system.scale = kTwoPi;
  c.system.sites = {{0.0}, {0.5}};
  c.system.depth = 3.0;
  c.system.width = 0.7;
  c.system.n_up = 1;
  c.system.n_down = 1;
  c.group.builtin = "1d-reflection-half";
  c.ansatz.cutoff = 24;
  c.ansatz.init = "oracle";
  c.oracle.cutoff = 24;
  c.sampler.step_size = 0.15;
  c.evaluation.chains = 16;
  c.evaluation.samples_per_chain = 250;
  c.evaluation.burn_in = 200;
  c.seed = 21;
  return c;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const ExperimentConfig c = well_config();
  const fs::path dir = fresh("oracle_equivalence");
  ExperimentConfig oc = c;
  oc.oracle.cutoff = 64;
  const double e0 = run_oracle(oc, quiet(dir))["ground_state_energy"].get<double>();
  run_train(c, quiet(dir));
  ExperimentConfig ec = c;
  ec.evaluation.samples_per_chain = 1000;
  const auto j = run_evaluate(ec, quiet(dir, dir));
  const double e = j["energy"].get<double>(), se = j["stderr"].get<double>();
  return {std::abs(e - e0) <= 1e-3, fmt("E = %.7f +- %.1e, oracle %.7f, |diff| = %.2e (tol 1e-3)", e, se, e0,
                                        std::abs(e - e0))};
}

Outcome zero_variance() {
  const ExperimentConfig c = twin_config();
  const Hamiltonian h = build_hamiltonian(c);
  const SpectrumResult s = diagonalize(h, c.oracle.cutoff);
  const double e0 = ground_state_energy(s, 1, 1);
  const Ansatz exact = exact_ansatz(s, 1, 1);
  const SpaceGroup g = build_group(c);
  const auto& ev = c.evaluation;
  double worst_var = 0.0, worst_diff = 0.0;
  int checked = 0;
  auto measure = [&](const Wavefunction& psi) {
    const SampleSet set = sample_inference(psi, ev.chains, ev.samples_per_chain, ev.thin, ev.burn_in,
                                           c.sampler.step_size, 3);
    const EnergyMetrics m = evaluate_metrics(h, psi, set.samples);
    worst_var = std::max(worst_var, m.variance);
    worst_diff = std::max(worst_diff, std::abs(m.energy - e0));
    ++checked;
  };
  measure(exact);
  for (const auto& sub : subgroups(g)) measure(GroupAveraged(exact, sub.elements()));
  return {worst_var <= 1e-12 && worst_diff <= 1e-10,
          fmt("%d wavefunctions (exact + GA over every subgroup): max Var[E_L] = %.2e (tol 1e-12), max |E - E0| = "
              "%.2e (tol 1e-10)",
              checked, worst_var, worst_diff)};
}

Outcome pa_recovery() {
  const ExperimentConfig c = twin_config();
  const Hamiltonian h = build_hamiltonian(c);
  const SpectrumResult s = diagonalize(h, c.oracle.cutoff);
  const double e0 = ground_state_energy(s, 1, 1);
  const SpaceGroup g = build_group(c);
  const Ansatz pert = perturb_asymmetric(exact_ansatz(s, 1, 1), g, 0.2, 5);
  const auto& ev = c.evaluation;
  auto metrics = [&](const Wavefunction& psi) {
    const SampleSet set = sample_inference(psi, ev.chains, ev.samples_per_chain, ev.thin, ev.burn_in,
                                           c.sampler.step_size, 4);
    return evaluate_metrics(h, psi, set.samples);
  };
  const EnergyMetrics pa = metrics(GroupAveraged(pert, g.elements()));
  const EnergyMetrics og = metrics(pert);
  const bool ok = std::abs(pa.energy - e0) <= 1e-8 && pa.variance <= 1e-10 && og.variance >= 1e-4;
  return {ok, fmt("PA: |E - E0| = %.2e (tol 1e-8), Var = %.2e (tol 1e-10); OG: Var = %.2e (need >= 1e-4)",
                  std::abs(pa.energy - e0), pa.variance, og.variance)};
}

Outcome prop41() {
  using R = Rational;
  bool discrete_ok = true;
  std::string detail;
  // hand enumeration: one orbit gives no excess; two orbits with N = 4 give (k - 1)/4
  const auto one = discrete_prop41(two_point_toy(), 2, 2);
  discrete_ok &= one.excess == R(0) && one.predicted == R(0);
  for (int k : {2, 4}) {
    const auto two = discrete_prop41(two_orbit_toy(), 4, k);
    discrete_ok &= two.excess == R(k - 1, 4) && two.predicted == R(k - 1, 4) && two.mean_og == two.mean_da;
  }
  const auto b = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::chain, kTwoPi), 2);
  // only even modes on the twin wells: the density is invariant under the whole group
  const Ansatz even(b, 1, 0, false, (Vec(5) << 1.0, 0.0, 0.0, 0.45, 0.0).finished());
  const UpdateContext ctx{twin_well_chain(), even, builtin_group("1d-reflection-half"), {}, 8, 4, SamplerOptions{},
                          true, -2.5};
  const Prop41Report rep = prop41_check(ctx, 400, 11);
  Eigen::Index worst = 0;
  (rep.excess - rep.predicted).cwiseAbs().cwiseQuotient(rep.excess_sigma.cwiseMax(1e-300)).maxCoeff(&worst);
  detail = fmt("discrete toys exact: %s; continuous R = 400: mean %s, excess %s (worst %.2f sigma), "
               "min eigenvalue %.2e (sigma %.2e) %s",
               discrete_ok ? "yes" : "no", rep.mean_ok ? "ok" : "FAIL", rep.excess_ok ? "ok" : "FAIL",
               std::abs(rep.excess[worst] - rep.predicted[worst]) / rep.excess_sigma[worst], rep.min_eigenvalue,
               rep.min_eigenvalue_sigma, rep.eigen_ok ? "ok" : "FAIL");
  return {discrete_ok && rep.ok(), detail};
}

Outcome lemma42() {
  const auto b = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::chain, kTwoPi), 2);
  const Ansatz a(b, 1, 0, false, (Vec(5) << 1.0, 0.45, 0.0, 0.12, 0.0).finished());
  const UpdateContext ctx{well_chain(), a, builtin_group("1d-reflection-half"), {}, 16, 4, SamplerOptions{}, true,
                          -3.5};
  const Lemma42Report rep = lemma42_check(ctx, 400, 12);
  double worst = 0.0;
  for (Eigen::Index l = 0; l < rep.sigma.size(); ++l)
    if (rep.sigma[l] > 0)
      worst = std::max(worst, std::abs(rep.scaled_replicate_variance[l] - rep.single_draw_variance[l]) / rep.sigma[l]);
  return {rep.ok, fmt("N = 16, k = 4, R = 400: worst coordinate %.2f sigma (tol 3)", worst)};
}

// SC checks along a segment that crosses a region boundary and its eps-shell.
struct ScStats {
  double invariance = 0.0, antisymmetry = 0.0, derivative = 0.0;
  int points = 0, sign_errors = 0;
};

void sc_scan(const SmoothedCanonical& sc, const Configuration& base, const Vec& from, const Vec& to, int n,
             double fd_step, ScStats& st) {
  const SpaceGroup& g = sc.group();
  for (int t = 0; t < n; ++t) {
    Configuration c = base;
    c.positions.row(0) = (from + (to - from) * (t / static_cast<double>(n - 1))).transpose();
    const auto e = sc.evaluate(c);
    if (e.is_node()) continue;
    ++st.points;
    for (const auto& h : g.elements()) {
      const auto eh = sc.evaluate(apply_diagonal(h, c), EvalLevel::value);
      st.invariance = std::max(st.invariance, std::abs(eh.log_abs - e.log_abs));
      st.sign_errors += eh.sign != e.sign;
    }
    Configuration swapped = c;
    swapped.positions.row(0).swap(swapped.positions.row(1));
    const auto es = sc.evaluate(swapped, EvalLevel::value);
    st.antisymmetry = std::max(st.antisymmetry, std::abs(es.log_abs - e.log_abs));
    st.sign_errors += es.sign != -e.sign;
    const FdResult fd = finite_difference(sc, c, fd_step);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); };
    for (Eigen::Index i = 0; i < fd.grad_log.size(); ++i)
      st.derivative = std::max(st.derivative, rel(e.grad_x.data()[i], fd.grad_log.data()[i]));
    st.derivative = std::max(st.derivative, rel(e.laplacian_over_psi, fd.laplacian_over_psi));
  }
}

Outcome sc_properties() {
  ScStats st;
  for (auto kind : {SmoothingKind::spline2, SmoothingKind::smooth_inf}) {
    // 2D: p4mm with the triangle region; electron 0 crosses the face y = 0
    const auto b2 = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::square, 1.0), 2);
    const Ansatz a2 = Ansatz::random(b2, 2, 1, true, 8, 0.5);
    const SmoothedCanonical sc2(a2, builtin_group("p4mm"), builtin_region("p4mm-triangle"), {kind, 0.05});
    Configuration base2{Mat(3, 2), a2.spin_layout()};
    base2.positions << 0.0, 0.0, 0.62, 0.27, 0.18, 0.81;
    sc_scan(sc2, base2, (Vec(2) << 0.31, -0.12).finished(), (Vec(2) << 0.35, 0.12).finished(), 500, 1e-5, st);
    // 1D: reflection with the half interval; electron 0 crosses x = 0 and x = 1/2
    const auto b1 = std::make_shared<const PlaneWaveBasis>(Lattice::make(LatticeKind::chain, kTwoPi), 4);
    const Ansatz a1 = Ansatz::random(b1, 2, 0, false, 9, 0.5);
    const SmoothedCanonical sc1(a1, builtin_group("1d-reflection"), builtin_region("half-interval"), {kind, 0.05});
    const Configuration base1 = config_1d({0.0, 0.27});
    sc_scan(sc1, base1, Vec::Constant(1, -0.1), Vec::Constant(1, 0.1), 250, 1e-5, st);
    sc_scan(sc1, base1, Vec::Constant(1, 0.4), Vec::Constant(1, 0.6), 250, 1e-5, st);
  }
  const bool ok = st.invariance <= 1e-10 && st.antisymmetry <= 1e-12 && st.derivative <= 1e-5 && st.sign_errors == 0 &&
                  st.points >= 1000;
  return {ok, fmt("%d points, both kinds: invariance %.1e (tol 1e-10), antisymmetry %.1e (tol 1e-12), "
                  "derivatives vs finite differences %.1e relative (tol 1e-5), sign errors %d",
                  st.points, st.invariance, st.antisymmetry, st.derivative, st.sign_errors)};
}

Outcome blowup() {
  const std::vector<double> eps{0.1, 0.05, 0.01};
  // nodeless base with a small asymmetric part, so the shell mixes two values of one sign
  ExperimentConfig c = well_config();
  c.system.n_up = 1;
  c.ansatz.cutoff = 8;
  c.oracle.cutoff = 8;
  c.ansatz.init = "oracle-perturbed";
  c.ansatz.perturbation = 0.05;
  const FundamentalRegion region = builtin_region("half-interval");
  BlowupFixture fx{build_hamiltonian(c), build_initial_ansatz(c), build_group(c), region, {0.0, 0.5}};
  bool ok = true;
  std::string detail;
  for (auto kind : {SmoothingKind::spline2, SmoothingKind::smooth_inf}) {
    const auto rows = blowup_probe(eps, kind, &fx);
    detail += to_string(kind) + ":";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      ok &= r.max_first >= 1.0 / r.epsilon && r.max_second >= 1.0 / (r.epsilon * r.epsilon);
      if (i > 0) ok &= r.energy_deviation > rows[i - 1].energy_deviation;
      detail += fmt(" eps %.2f |l'| %.3g |l''| %.3g dE %.3g;", r.epsilon, r.max_first, r.max_second,
                    r.energy_deviation);
    }
    detail += " ";
  }
  return {ok, detail};
}

Outcome scan_identity() {
  // square lattice, one well at the origin: the ground orbital is p4mm-invariant
  Hamiltonian h;
  h.lattice = Lattice::make(LatticeKind::square, kTwoPi);
  h.sites = {Vec::Zero(2)};
  h.depth = 5.0;
  h.width = 1.0;
  const SpectrumResult s = diagonalize(h, 6);
  const SpaceGroup g = builtin_group("p4mm");
  const Ansatz pert = perturb_asymmetric(exact_ansatz(s, 1, 0), g, 0.2, 6);
  const Configuration base = orbit_configuration(g, std::vector<Vec>{Vec::Zero(2)}, Spin::up);
  const GroupAveraged pa(pert, g.elements());
  const auto epa = symmetry_error(scan(pa, g, base, 101), g);
  const auto eog = symmetry_error(scan(pert, g, base, 101), g);
  const bool ok = epa.max <= 1e-9 && epa.relations_satisfied == g.order() && eog.max >= 1e-2;
  return {ok, fmt("101 x 101 grid: PA max error %.1e (tol 1e-9, %zu/%zu relations), OG max error %.3g (need >= 1e-2)",
                  epa.max, epa.relations_satisfied, epa.relations_checked, eog.max)};
}

Outcome clt() {
  const std::vector<std::size_t> batches{16, 64, 256};
  bool ok = true;
  std::string detail;
  for (auto m : {UpdateMethod::og, UpdateMethod::da, UpdateMethod::ga}) {
    const CltReport rep = clt_check(m, SyntheticFixture{}, batches, 4, 2000, 13);
    ok &= rep.monotone;
    detail += to_string(m) + " KS";
    for (const auto& p : rep.points) detail += fmt(" %.3f", p.max_ks);
    detail += rep.monotone ? " ok; " : " FAIL; ";
  }
  return {ok, detail};
}

Outcome trend() {
  ExperimentConfig c = twin_config();
  c.system.interaction = 1.0;
  c.ansatz.cutoff = 4;
  c.ansatz.jastrow = true;
  c.ansatz.init = "random";
  c.ansatz.init_scale = 0.3;
  c.sampler.walkers = 128;
  c.training.steps = 600;
  c.training.learning_rate = 0.05;
  c.training.decay_every = 300;
  c.evaluation.chains = 16;
  c.evaluation.samples_per_chain = 400;
  c.stats.replicates = 200;
  c.stats.batch = 64;
  c.stats.methods = {"og", "da"};
  c.method.k = 4;

  std::vector<double> de, dv;
  int da_ok = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    c.ansatz.init_seed = seed;
    const fs::path dir = fresh("trend_seed" + std::to_string(seed));
    ExperimentConfig tc = c;
    tc.method.name = "og";
    run_train(tc, quiet(dir));
    const auto og = run_evaluate(tc, quiet(dir, dir));
    ExperimentConfig pc = tc;
    pc.method.name = "pa";
    const auto pa = run_evaluate(pc, quiet(dir, dir));
    de.push_back(pa["energy"].get<double>() - og["energy"].get<double>());
    dv.push_back(pa["var_local_energy"].get<double>() - og["var_local_energy"].get<double>());
    const auto gs = run_gradstats(tc, quiet(dir, dir));
    da_ok += gs["comparisons"]["da_vs_og"]["not_below"].get<bool>();
  }
  auto mean_sigma = [](const std::vector<double>& x) {
    double m = 0, v = 0;
    for (double a : x) m += a;
    m /= static_cast<double>(x.size());
    for (double a : x) v += (a - m) * (a - m);
    v /= static_cast<double>(x.size() - 1);
    return std::pair{m, std::sqrt(v / static_cast<double>(x.size()))};
  };
  const auto [me, se] = mean_sigma(de);
  const auto [mv, sv] = mean_sigma(dv);
  const bool ok = da_ok == 5 && me <= 2 * se && mv <= 2 * sv;
  return {ok, fmt("DA >= OG - 3 sigma in %d/5 seeds; E(PA) - E(OG) = %.2e +- %.1e; Var(PA) - Var(OG) = %.2e +- %.1e "
                  "(need <= 2 sigma)",
                  da_ok, me, se, mv, sv)};
}

Outcome determinism() {
  // rerun the pipelines behind criteria 1 and 10 (one seed) and compare every artifact but timings
  std::vector<std::string> diffs;
  auto pipeline = [](const fs::path& dir) {
    ExperimentConfig c = well_config();
    run_train(c, quiet(dir));
    run_evaluate(c, quiet(dir, dir));
    c.stats.replicates = 50;
    c.stats.batch = 32;
    c.method.k = 2;
    run_gradstats(c, quiet(dir, dir));
    c.scan.orbit_seeds = {{0.0}, {0.5}};
    run_scan(c, quiet(dir, dir));
    ExperimentConfig p = c;
    p.system.n_up = 1;
    p.method.region.builtin = "half-interval";
    run_probe_smoothing(p, quiet(dir / "probe"));
  };
  const fs::path a = fresh("determinism_a"), b = fresh("determinism_b");
  pipeline(a);
  pipeline(b);
  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "timings.csv") continue;
    const fs::path rel = fs::relative(e.path(), a);
    ++compared;
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) diffs.push_back(rel.string());
  }
  std::string detail = fmt("%d files compared, %zu differ", compared, diffs.size());
  for (const auto& d : diffs) detail += " " + d;
  return {diffs.empty() && compared > 10, detail};
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "diagsym_acceptance";
  fs::create_directories(g_root);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"zero variance of exact and group-averaged states", zero_variance},
      {"projection recovers the perturbed exact state", pa_recovery},
      {"augmentation variance excess, invariant case", prop41},
      {"group-averaged update variance", lemma42},
      {"smoothed canonicalization invariance, antisymmetry, derivatives", sc_properties},
      {"smoothing blowup", blowup},
      {"scan identity on the square lattice", scan_identity},
      {"central limit harness", clt},
      {"trend on the interacting fixture", trend},
      {"determinism", determinism},
  };
  std::set<std::size_t> only;
  if (argc > 2) {
    std::istringstream list(argv[2]);
    for (std::string item; std::getline(list, item, ',');) only.insert(std::stoul(item));
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << " (" << fmt("%.1f", secs)
              << " s): " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
