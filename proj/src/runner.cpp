#include "diagsym/runner.hpp"

#include "diagsym/oracle.hpp"
#include "diagsym/scan.hpp"
#include "diagsym/stats.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

namespace diagsym {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'S', 'Y', 'M', 'C', 'K', 'P', '1'};

fs::path run_dir(const ExperimentConfig& c, const RunOptions& o) {
  fs::path dir = o.out.empty() ? fs::path(c.output) : o.out;
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

void write_config_copy(const fs::path& dir, const ExperimentConfig& c) {
  write_json(dir / "config.json", emit_config(c));
}

// Shortest round-trip representation, so CSVs are stable across runs.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return json(x).dump();
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void report(const RunOptions& o, const json& j) {
  if (!o.quiet) std::cout << j.dump(2) << std::endl;
}

// Relative to the run directory when the checkpoint lives inside it, so reports
// do not depend on where the run directory is.
std::string checkpoint_label(const fs::path& checkpoint, const fs::path& dir) {
  const fs::path bin = fs::weakly_canonical(resolve_checkpoint(checkpoint));
  const fs::path rel = bin.lexically_relative(fs::weakly_canonical(dir));
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return bin.generic_string();
}

Ansatz starting_ansatz(const ExperimentConfig& c, const RunOptions& o) {
  return o.checkpoint ? load_checkpoint(*o.checkpoint, c) : build_initial_ansatz(c);
}

std::unique_ptr<Wavefunction> inference_wavefunction(const ExperimentConfig& c, const Ansatz& a,
                                                     const SpaceGroup& group) {
  const std::string& m = c.method.name;
  if (m == "og") return std::make_unique<Ansatz>(a);
  if (m == "pa" || m == "ga") return std::make_unique<GroupAveraged>(a, group.subset(build_subset(c, group)));
  if (m == "pc" || m == "sc")
    return std::make_unique<SmoothedCanonical>(a, group, build_region(c), build_smoothing(c));
  throw ConfigError("method.name: '" + m + "' cannot be evaluated");
}

json shape_json(const Ansatz& a, const ExperimentConfig& c) {
  return {{"num_params", a.num_params()},
          {"basis_size", a.basis().size()},
          {"n_up", a.n_up()},
          {"n_down", a.n_down()},
          {"jastrow", a.has_jastrow()},
          {"cutoff", c.ansatz.cutoff},
          {"lattice", c.system.lattice},
          {"scale", c.system.scale}};
}

UpdateContext update_context(const ExperimentConfig& c, const Ansatz& base, const SpaceGroup& group) {
  UpdateContext ctx{build_hamiltonian(c), base, group, build_subset(c, group), c.stats.batch, c.method.k,
                    SamplerOptions{c.sampler.steps, c.sampler.burn_in, c.sampler.step_size},
                    c.stats.exact_sampling, c.stats.baseline, std::nullopt, build_smoothing(c)};
  if (!c.method.region.builtin.empty() || !c.method.region.center.empty()) ctx.region = build_region(c);
  return ctx;
}

}  // namespace

void save_checkpoint(const fs::path& dir, int step, const Ansatz& a, const ExperimentConfig& c) {
  fs::create_directories(dir);
  const std::string stem = "step_" + std::to_string(step);
  {
    std::ofstream out(dir / (stem + ".bin"), std::ios::binary);
    if (!out) throw Error("cannot write checkpoint in " + dir.string());
    const std::uint64_t n = a.num_params();
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(a.params().data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  json side = shape_json(a, c);
  side["step"] = step;
  side["seed"] = c.seed;
  write_json(dir / (stem + ".json"), side);
}

fs::path resolve_checkpoint(const fs::path& path) {
  fs::path bin = path;
  if (fs::is_directory(path)) {
    const fs::path dir = fs::is_directory(path / "checkpoints") ? path / "checkpoints" : path;
    const std::regex pat(R"(step_(\d+)\.bin)");
    long best = -1;
    for (const auto& e : fs::directory_iterator(dir)) {
      std::smatch mm;
      const std::string name = e.path().filename().string();
      if (std::regex_match(name, mm, pat) && std::stol(mm[1]) > best) {
        best = std::stol(mm[1]);
        bin = e.path();
      }
    }
    if (best < 0) throw CheckpointError("no checkpoints found in " + dir.string());
  } else if (path.extension() == ".json") {
    bin = fs::path(path).replace_extension(".bin");
  }
  return bin;
}

Ansatz load_checkpoint(const fs::path& path, const ExperimentConfig& c) {
  const fs::path bin = resolve_checkpoint(path);
  const fs::path side_path = fs::path(bin).replace_extension(".json");
  std::ifstream sin(side_path);
  if (!sin) throw CheckpointError("missing checkpoint sidecar " + side_path.string());
  json side;
  try {
    side = json::parse(sin);
  } catch (const json::parse_error& e) {
    throw CheckpointError("corrupt checkpoint sidecar " + side_path.string() + ": " + e.what());
  }

  const Ansatz expected = build_initial_ansatz(c);
  const json want = shape_json(expected, c);
  for (auto it = want.begin(); it != want.end(); ++it) {
    if (!side.contains(it.key()) || side.at(it.key()) != it.value())
      throw CheckpointError("checkpoint " + bin.string() + " is incompatible with the config: " + it.key() +
                            " is " + (side.contains(it.key()) ? side.at(it.key()).dump() : "missing") +
                            ", expected " + it.value().dump());
  }

  std::ifstream in(bin, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + bin.string());
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file: " + bin.string());
  if (n != expected.num_params())
    throw CheckpointError("checkpoint " + bin.string() + " holds " + std::to_string(n) + " parameters, expected " +
                          std::to_string(expected.num_params()));
  Vec p(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw CheckpointError("truncated checkpoint " + bin.string());
  return expected.with_params(std::move(p));
}

json run_oracle(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "oracle");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const int levels = std::max({c.system.n_up, c.system.n_down, 1});
  const SpectrumResult s = diagonalize(build_hamiltonian(c), c.oracle.cutoff, levels);
  json j = {{"cutoff", s.cutoff},
            {"eigenvalues", s.eigenvalues},
            {"n_up", c.system.n_up},
            {"n_down", c.system.n_down},
            {"shift", s.shift},
            {"ground_state_energy", ground_state_energy(s, c.system.n_up, c.system.n_down)},
            {"degenerate", is_degenerate(s, c.system.n_up, c.system.n_down)},
            {"converged", s.converged},
            {"convergence_shift", s.convergence_shift},
            {"max_residual", s.max_residual}};
  write_json(dir / "reports" / "oracle.json", j);
  report(o, j);
  return j;
}

json run_train(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "train");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const Hamiltonian h = build_hamiltonian(c);
  const SpaceGroup group = build_group(c);
  const Ansatz init = starting_ansatz(c, o);

  TrainOptions opt;
  opt.method = update_method_from_string(c.method.name);
  opt.steps = c.training.steps;
  opt.walkers = c.sampler.walkers;
  opt.k = c.method.k;
  opt.subset = build_subset(c, group);
  opt.sampler = SamplerOptions{c.sampler.steps, c.sampler.burn_in, c.sampler.step_size};
  opt.learning_rate = c.training.learning_rate;
  opt.decay_every = c.training.decay_every;
  opt.decay_factor = c.training.decay_factor;
  opt.checkpoint_every = c.training.checkpoint_every;
  opt.seed = stream_seed(c.seed, "train", 0);
  if (opt.method == UpdateMethod::sc) {
    opt.region = build_region(c);
    opt.smoothing = build_smoothing(c);
  }

  // Rows are flushed as they come so a diverged run keeps its trace.
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  std::ofstream timings(dir / "timings.csv", std::ios::binary);
  metrics << "step,energy,stderr,var_local_energy,acceptance,learning_rate\n";
  timings << "step,wall_seconds,sample_seconds,grad_seconds\n";
  metrics.flush();
  timings.flush();
  const fs::path ckdir = dir / "checkpoints";
  int last_saved = -1;

  TrainCallbacks cb;
  cb.on_step = [&](const TrainRecord& r) {
    metrics << r.step << ',' << num(r.energy) << ',' << num(r.stderr_energy) << ',' << num(r.variance) << ','
            << num(r.acceptance) << ',' << num(r.learning_rate) << '\n';
    metrics.flush();
    timings << r.step << ',' << num(r.sample_seconds + r.grad_seconds) << ',' << num(r.sample_seconds) << ','
            << num(r.grad_seconds) << '\n';
    timings.flush();
    if (!o.quiet && (r.step % 100 == 0 || r.step == c.training.steps))
      std::cerr << "step " << r.step << "  E = " << r.energy << " +- " << r.stderr_energy << '\n';
  };
  cb.on_checkpoint = [&](int step, const Ansatz& a) {
    save_checkpoint(ckdir, step, a, c);
    last_saved = step;
  };

  const TrainResult res = train(h, init, group, opt, cb);
  if (last_saved != c.training.steps) save_checkpoint(ckdir, c.training.steps, res.final, c);

  json j = {{"method", c.method.name},
            {"steps", c.training.steps},
            {"checkpoint", "checkpoints/step_" + std::to_string(c.training.steps) + ".bin"}};
  if (!res.trace.empty()) {
    j["final_energy"] = res.trace.back().energy;
    j["final_stderr"] = res.trace.back().stderr_energy;
  }
  write_json(dir / "reports" / "train.json", j);
  report(o, j);
  return j;
}

json run_evaluate(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "evaluate");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const Hamiltonian h = build_hamiltonian(c);
  const SpaceGroup group = build_group(c);
  const Ansatz a = starting_ansatz(c, o);
  const auto psi = inference_wavefunction(c, a, group);
  const std::uint64_t seed = stream_seed(c.seed, "evaluate", 0);
  const auto& e = c.evaluation;
  const SampleSet set = sample_inference(*psi, e.chains, e.samples_per_chain, e.thin, e.burn_in, c.sampler.step_size, seed);
  const EnergyMetrics m = evaluate_metrics(h, *psi, set.samples, set.acceptance);

  json j = {{"method", c.method.name},
            {"energy", m.energy},
            {"stderr", m.stderr_energy},
            {"var_local_energy", m.variance},
            {"acceptance", m.acceptance},
            {"samples", m.samples},
            {"checkpoint", o.checkpoint ? checkpoint_label(*o.checkpoint, dir) : std::string("initial")}};
  if (c.method.name == "pa" || c.method.name == "ga") {
    const auto subset = build_subset(c, group);
    j["subset"] = subset;
    const SampleSet og = sample_inference(a, e.chains, e.samples_per_chain, e.thin, e.burn_in, c.sampler.step_size, seed);
    const RatioVariance rv = var_pa_over_og(a, group.subset(subset), og.samples);
    j["var_pa_over_og"] = rv.value;
  }
  write_json(dir / "reports" / ("evaluate_" + c.method.name + ".json"), j);
  report(o, j);
  return j;
}

json run_scan(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "scan");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const SpaceGroup group = build_group(c);
  const Ansatz a = starting_ansatz(c, o);
  const auto psi = inference_wavefunction(c, a, group);

  Configuration base;
  if (!c.scan.positions.empty()) {
    const auto& pos = c.scan.positions;
    base.positions = Mat(static_cast<Eigen::Index>(pos.size()), group.dim());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (static_cast<int>(pos[i].size()) != group.dim())
        throw ConfigError("scan.positions[" + std::to_string(i) + "]: wrong dimension");
      for (int l = 0; l < group.dim(); ++l) base.positions(static_cast<Eigen::Index>(i), l) = pos[i][l];
      const std::string sp = c.scan.spins.empty() ? "up" : c.scan.spins[i];
      if (sp != "up" && sp != "down") throw ConfigError("scan.spins: expected up or down, got '" + sp + "'");
      base.spins.push_back(sp == "up" ? Spin::up : Spin::down);
    }
  } else {
    std::vector<Vec> seeds;
    for (const auto& s : c.scan.orbit_seeds) {
      if (static_cast<int>(s.size()) != group.dim()) throw ConfigError("scan.orbit_seeds: wrong dimension");
      seeds.push_back(Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size())));
    }
    base = orbit_configuration(group, seeds, Spin::up);
  }
  const auto n_of = [&](Spin s) { return static_cast<int>(std::count(base.spins.begin(), base.spins.end(), s)); };
  if (n_of(Spin::up) != a.n_up() || n_of(Spin::down) != a.n_down())
    throw ConfigError("scan: the base configuration has " + std::to_string(n_of(Spin::up)) + " up / " +
                      std::to_string(n_of(Spin::down)) + " down electrons, the ansatz expects " +
                      std::to_string(a.n_up()) + " / " + std::to_string(a.n_down()));
  // the Slater determinant wants ups first
  std::vector<int> order(static_cast<std::size_t>(base.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return base.spins[static_cast<std::size_t>(x)] < base.spins[static_cast<std::size_t>(y)]; });
  Configuration sorted{Mat(base.size(), base.dim()), {}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.positions.row(static_cast<Eigen::Index>(i)) = base.positions.row(order[i]);
    sorted.spins.push_back(base.spins[static_cast<std::size_t>(order[i])]);
  }

  const ScanGrid grid = scan(*psi, group, sorted, c.scan.resolution, c.scan.axes);
  const SymmetryErrorMap err = symmetry_error(grid, group);
  std::ostringstream csv;
  write_scan_csv(csv, grid, &err);
  write_text(dir / "scans" / ("scan_" + c.method.name + ".csv"), csv.str());
  json j = {{"method", c.method.name},
            {"resolution", c.scan.resolution},
            {"max_error", err.max},
            {"mean_error", err.mean},
            {"nodes", err.nodes},
            {"relations_checked", err.relations_checked},
            {"relations_satisfied", err.relations_satisfied},
            {"per_element", err.per_element}};
  write_json(dir / "reports" / ("scan_" + c.method.name + ".json"), j);
  report(o, j);
  return j;
}

json run_gradstats(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "gradstats");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const SpaceGroup group = build_group(c);
  const UpdateContext ctx = update_context(c, starting_ansatz(c, o), group);
  const std::uint64_t seed = stream_seed(c.seed, "gradstats", 0);

  json j = {{"replicates", c.stats.replicates}, {"batch", c.stats.batch}, {"k", c.method.k}};
  std::map<std::string, UpdateStats> all;
  for (const auto& name : c.stats.methods) {
    const UpdateStats s = update_distribution(update_method_from_string(name), ctx, c.stats.replicates, seed);
    all[name] = s;
    j["methods"][name] = {{"norm", s.norm},
                          {"norm_stderr", s.norm_stderr},
                          {"diag_max_norm", s.diag_max_norm},
                          {"diag_max_stderr", s.diag_max_stderr},
                          {"reliable", s.reliable},
                          {"mean", vec_json(s.mean)},
                          {"variance", vec_json(s.variance)}};
  }
  // spectral-norm comparisons, 3 sigma
  const auto compare = [&](const std::string& hi, const std::string& lo) {
    if (!all.count(hi) || !all.count(lo)) return;
    const double diff = all[hi].norm - all[lo].norm;
    const double sigma = std::hypot(all[hi].norm_stderr, all[lo].norm_stderr);
    j["comparisons"][hi + "_vs_" + lo] = {{"difference", diff}, {"sigma", sigma}, {"not_below", diff >= -3.0 * sigma}};
  };
  compare("da", "og");
  compare("og", "ga");
  write_json(dir / "reports" / "gradstats.json", j);
  report(o, j);
  return j;
}

json run_probe_smoothing(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c, "probe-smoothing");
  const fs::path dir = run_dir(c, o);
  write_config_copy(dir, c);
  const SmoothingKind kind = smoothing_kind_from_string(c.method.smoothing);
  const FundamentalRegion region = build_region(c);

  std::optional<BlowupFixture> fx;
  const Ansatz a = starting_ansatz(c, o);
  if (a.dim() == 1 && a.n_electrons() == 1) {
    fx = BlowupFixture{build_hamiltonian(c), a, build_group(c), region, {}};
    for (const auto& f : region.faces) fx->scan_centres.push_back(region.center[0] + f[0]);
    for (double eps : c.stats.epsilons)
      if (!(eps < region.inradius()))
        throw ConfigError("stats.epsilons: " + num(eps) + " is not below the region inradius " +
                          num(region.inradius()));
  }
  const auto rows = blowup_probe(c.stats.epsilons, kind, fx ? &*fx : nullptr);

  std::ostringstream csv;
  csv << "epsilon,kind,max_first,max_second,energy_deviation\n";
  json j = json::array();
  for (const auto& r : rows) {
    csv << num(r.epsilon) << ',' << to_string(r.kind) << ',' << num(r.max_first) << ',' << num(r.max_second) << ','
        << (fx ? num(r.energy_deviation) : std::string("")) << '\n';
    json row = {{"epsilon", r.epsilon}, {"kind", to_string(r.kind)}, {"max_first", r.max_first},
                {"max_second", r.max_second}};
    if (fx) row["energy_deviation"] = r.energy_deviation;
    j.push_back(row);
  }
  write_text(dir / "reports" / "probe_smoothing.csv", csv.str());
  write_json(dir / "reports" / "probe_smoothing.json", j);
  if (!o.quiet) std::cout << csv.str();
  return j;
}

json run_stage(const std::string& stage, const ExperimentConfig& c, const RunOptions& o) {
  if (stage == "oracle") return run_oracle(c, o);
  if (stage == "train") return run_train(c, o);
  if (stage == "evaluate") return run_evaluate(c, o);
  if (stage == "scan") return run_scan(c, o);
  if (stage == "gradstats") return run_gradstats(c, o);
  if (stage == "probe-smoothing") return run_probe_smoothing(c, o);
  throw ConfigError("unknown subcommand '" + stage + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const CheckpointError*>(&e)) return 4;
  return 1;
}

}  // namespace diagsym
