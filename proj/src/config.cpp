#include "diagsym/config.hpp"

#include "diagsym/oracle.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace diagsym {

using nlohmann::json;

namespace {

std::string type_name(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "list";
  return "mapping";
}

// Walks one mapping; every key must be consumed, otherwise the leftover is reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected a mapping, got " + type_name(j_));
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(child(key) + ": expected a number, got " + type_name(*v));
      out = v->get<double>();
    }
  }
  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(child(key) + ": expected a number, got " + type_name(*v));
      out = v->get<double>();
    }
  }
  template <class I>
  void integer(const std::string& key, I& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(child(key) + ": expected an integer, got " + type_name(*v));
      if constexpr (std::is_unsigned_v<I>) {
        if (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)
          throw ConfigError(child(key) + ": must be non-negative");
        out = v->get<I>();
      } else {
        out = v->get<I>();
      }
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key) + ": expected true or false, got " + type_name(*v));
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(child(key) + ": expected a string, got " + type_name(*v));
      out = v->get<std::string>();
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) out = as_numbers(*v, child(key));
  }
  void matrix(const std::string& key, std::vector<std::vector<double>>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(child(key) + ": expected a list, got " + type_name(*v));
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_numbers((*v)[i], child(key) + "[" + std::to_string(i) + "]"));
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(child(key) + ": expected a list, got " + type_name(*v));
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string())
          throw ConfigError(child(key) + "[" + std::to_string(i) + "]: expected a string, got " +
                            type_name((*v)[i]));
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(child(it.key()) + ": unknown key");
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + ": expected a list of numbers, got " + type_name(v));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number, got " + type_name(v[i]));
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read(Section& s, SystemConfig& c) {
  s.string("lattice", c.lattice);
  s.number("scale", c.scale);
  s.matrix("sites", c.sites);
  s.number("depth", c.depth);
  s.number("width", c.width);
  s.integer("image_range", c.image_range);
  s.number("interaction", c.interaction);
  s.number("shift", c.shift);
  s.integer("n_up", c.n_up);
  s.integer("n_down", c.n_down);
}

void read(Section& s, GroupConfig& c) {
  s.string("builtin", c.builtin);
  if (const json* v = s.take("generators")) {
    if (!v->is_array()) throw ConfigError(s.child("generators") + ": expected a list, got " + type_name(*v));
    c.generators.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section g((*v)[i], s.child("generators") + "[" + std::to_string(i) + "]");
      GeneratorConfig gc;
      g.matrix("rotation", gc.rotation);
      g.numbers("translation", gc.translation);
      g.finish();
      c.generators.push_back(std::move(gc));
    }
  }
}

void read(Section& s, AnsatzConfig& c) {
  s.integer("cutoff", c.cutoff);
  s.boolean("jastrow", c.jastrow);
  s.string("init", c.init);
  s.integer("init_seed", c.init_seed);
  s.number("init_scale", c.init_scale);
  s.number("perturbation", c.perturbation);
}

void read(Section& s, MethodConfig& c) {
  s.string("name", c.name);
  s.integer("k", c.k);
  if (const json* v = s.take("subset")) {
    if (v->is_string()) {
      c.subset = v->get<std::string>();
      c.subset_indices.clear();
    } else if (v->is_array()) {
      c.subset = "indices";
      c.subset_indices.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number_integer() || e.get<long long>() < 0)
          throw ConfigError(s.child("subset") + "[" + std::to_string(i) + "]: expected a non-negative integer");
        c.subset_indices.push_back(e.get<std::size_t>());
      }
    } else {
      throw ConfigError(s.child("subset") + ": expected a selector string or a list of element indices, got " +
                        type_name(*v));
    }
  }
  s.number("epsilon", c.epsilon);
  s.string("smoothing", c.smoothing);
  if (const json* v = s.take("region")) {
    if (v->is_string()) {
      c.region = RegionConfig{v->get<std::string>(), {}, {}};
    } else {
      Section r(*v, s.child("region"));
      r.string("builtin", c.region.builtin);
      r.numbers("center", c.region.center);
      r.matrix("faces", c.region.faces);
      r.finish();
    }
  }
}

void read(Section& s, SamplerConfig& c) {
  s.integer("walkers", c.walkers);
  s.integer("steps", c.steps);
  s.integer("burn_in", c.burn_in);
  s.number("step_size", c.step_size);
}

void read(Section& s, TrainingConfig& c) {
  s.integer("steps", c.steps);
  s.number("learning_rate", c.learning_rate);
  s.integer("decay_every", c.decay_every);
  s.number("decay_factor", c.decay_factor);
  s.integer("checkpoint_every", c.checkpoint_every);
}

void read(Section& s, EvaluationConfig& c) {
  s.integer("chains", c.chains);
  s.integer("samples_per_chain", c.samples_per_chain);
  s.integer("thin", c.thin);
  s.integer("burn_in", c.burn_in);
}

void read(Section& s, OracleConfig& c) { s.integer("cutoff", c.cutoff); }

void read(Section& s, StatsConfig& c) {
  s.integer("replicates", c.replicates);
  s.integer("batch", c.batch);
  s.strings("methods", c.methods);
  s.boolean("exact_sampling", c.exact_sampling);
  s.optional_number("baseline", c.baseline);
  s.numbers("epsilons", c.epsilons);
}

void read(Section& s, ScanConfig& c) {
  s.integer("resolution", c.resolution);
  s.matrix("positions", c.positions);
  s.strings("spins", c.spins);
  s.matrix("orbit_seeds", c.orbit_seeds);
  if (const json* v = s.take("axes")) {
    if (!v->is_array()) throw ConfigError(s.child("axes") + ": expected a list of integers");
    c.axes.clear();
    for (const auto& e : *v) {
      if (!e.is_number_integer()) throw ConfigError(s.child("axes") + ": expected a list of integers");
      c.axes.push_back(e.get<int>());
    }
  }
}

template <class T>
void section(Section& top, const std::string& key, T& out) {
  if (const json* v = top.take(key)) {
    Section s(*v, key);
    read(s, out);
    s.finish();
  }
}

json scalar_from_yaml(const YAML::Node& n) {
  const std::string& text = n.Scalar();
  if (n.Tag() == "!") return text;  // quoted
  if (text == "null" || text == "~" || text.empty()) return nullptr;
  if (text == "true" || text == "True") return true;
  if (text == "false" || text == "False") return false;
  {
    long long v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && p == text.data() + text.size()) return v;
  }
  {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && p == text.data() + text.size()) return v;
  }
  return text;
}

json from_yaml(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar: return scalar_from_yaml(n);
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(from_yaml(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = from_yaml(kv.second);
      return o;
    }
  }
  return nullptr;
}

Mat to_mat(const std::vector<std::vector<double>>& rows, const std::string& what) {
  if (rows.empty()) return Mat(0, 0);
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(what + ": rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const std::set<std::string> kTrainMethods{"og", "da", "ga", "gas", "sc"};
const std::set<std::string> kInferenceMethods{"og", "pa", "ga", "pc", "sc"};

bool needs_region(const std::string& m) { return m == "sc" || m == "pc"; }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Section top(j, "");
  section(top, "system", c.system);
  section(top, "group", c.group);
  section(top, "ansatz", c.ansatz);
  section(top, "method", c.method);
  section(top, "sampler", c.sampler);
  section(top, "training", c.training);
  section(top, "evaluation", c.evaluation);
  section(top, "oracle", c.oracle);
  section(top, "stats", c.stats);
  section(top, "scan", c.scan);
  top.integer("seed", c.seed);
  top.string("output", c.output);
  top.finish();
  return c;
}

json emit_config(const ExperimentConfig& c) {
  json j;
  j["system"] = {{"lattice", c.system.lattice},         {"scale", c.system.scale},
                 {"sites", c.system.sites},             {"depth", c.system.depth},
                 {"width", c.system.width},             {"image_range", c.system.image_range},
                 {"interaction", c.system.interaction}, {"shift", c.system.shift},
                 {"n_up", c.system.n_up},               {"n_down", c.system.n_down}};
  json group = json::object();
  if (!c.group.builtin.empty()) group["builtin"] = c.group.builtin;
  if (!c.group.generators.empty()) {
    group["generators"] = json::array();
    for (const auto& g : c.group.generators)
      group["generators"].push_back({{"rotation", g.rotation}, {"translation", g.translation}});
  }
  j["group"] = group;
  j["ansatz"] = {{"cutoff", c.ansatz.cutoff},         {"jastrow", c.ansatz.jastrow},
                 {"init", c.ansatz.init},             {"init_seed", c.ansatz.init_seed},
                 {"init_scale", c.ansatz.init_scale}, {"perturbation", c.ansatz.perturbation}};
  json method = {{"name", c.method.name},
                 {"k", c.method.k},
                 {"epsilon", c.method.epsilon},
                 {"smoothing", c.method.smoothing}};
  if (c.method.subset == "indices")
    method["subset"] = c.method.subset_indices;
  else
    method["subset"] = c.method.subset;
  json region = json::object();
  if (!c.method.region.builtin.empty()) region["builtin"] = c.method.region.builtin;
  if (!c.method.region.center.empty()) region["center"] = c.method.region.center;
  if (!c.method.region.faces.empty()) region["faces"] = c.method.region.faces;
  if (!region.empty()) method["region"] = region;
  j["method"] = method;
  j["sampler"] = {{"walkers", c.sampler.walkers},
                  {"steps", c.sampler.steps},
                  {"burn_in", c.sampler.burn_in},
                  {"step_size", c.sampler.step_size}};
  j["training"] = {{"steps", c.training.steps},
                   {"learning_rate", c.training.learning_rate},
                   {"decay_every", c.training.decay_every},
                   {"decay_factor", c.training.decay_factor},
                   {"checkpoint_every", c.training.checkpoint_every}};
  j["evaluation"] = {{"chains", c.evaluation.chains},
                     {"samples_per_chain", c.evaluation.samples_per_chain},
                     {"thin", c.evaluation.thin},
                     {"burn_in", c.evaluation.burn_in}};
  j["oracle"] = {{"cutoff", c.oracle.cutoff}};
  j["stats"] = {{"replicates", c.stats.replicates},
                {"batch", c.stats.batch},
                {"methods", c.stats.methods},
                {"exact_sampling", c.stats.exact_sampling},
                {"epsilons", c.stats.epsilons}};
  if (c.stats.baseline) j["stats"]["baseline"] = *c.stats.baseline;
  j["scan"] = {{"resolution", c.scan.resolution}, {"positions", c.scan.positions},
               {"spins", c.scan.spins},           {"orbit_seeds", c.scan.orbit_seeds},
               {"axes", c.scan.axes}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

json parse_document(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
  }
  try {
    return from_yaml(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(parse_document(ss.str()));
}

void validate_config(const ExperimentConfig& c, const std::string& stage) {
  static const std::set<std::string> stages{"oracle", "train", "evaluate", "scan", "gradstats", "probe-smoothing"};
  if (!stages.count(stage)) throw ConfigError("unknown stage '" + stage + "'");
  const auto& s = c.system;
  const LatticeKind kind = lattice_kind_from_string(s.lattice);
  const int d = Lattice::make(kind, 1.0).dim();
  if (!(s.scale > 0)) throw ConfigError("system.scale: must be positive");
  if (!(s.width > 0)) throw ConfigError("system.width: must be positive");
  if (s.image_range < 0) throw ConfigError("system.image_range: must be non-negative");
  if (s.n_up < 0 || s.n_down < 0 || s.n_up + s.n_down < 1)
    throw ConfigError("system.n_up/n_down: need at least one electron");
  for (std::size_t i = 0; i < s.sites.size(); ++i)
    if (static_cast<int>(s.sites[i].size()) != d)
      throw ConfigError("system.sites[" + std::to_string(i) + "]: expected " + std::to_string(d) + " coordinates");

  if (c.group.builtin.empty() == c.group.generators.empty())
    throw ConfigError("group: give exactly one of builtin or generators");
  if (!c.group.builtin.empty() && builtin_group_lattice(c.group.builtin) != kind)
    throw ConfigError("group.builtin: '" + c.group.builtin + "' lives on the " +
                      to_string(builtin_group_lattice(c.group.builtin)) + " lattice, system.lattice is " + s.lattice);
  for (std::size_t i = 0; i < c.group.generators.size(); ++i) {
    const auto& g = c.group.generators[i];
    if (static_cast<int>(g.rotation.size()) != d || static_cast<int>(g.translation.size()) != d)
      throw ConfigError("group.generators[" + std::to_string(i) + "]: expected dimension " + std::to_string(d));
  }

  if (c.ansatz.cutoff < 1) throw ConfigError("ansatz.cutoff: must be >= 1");
  if (c.ansatz.init != "random" && c.ansatz.init != "oracle" && c.ansatz.init != "oracle-perturbed")
    throw ConfigError("ansatz.init: expected random, oracle or oracle-perturbed");
  if (c.ansatz.init != "random" && s.interaction != 0.0)
    throw ConfigError("ansatz.init: oracle initialisation requires system.interaction = 0");
  if (c.oracle.cutoff < 1) throw ConfigError("oracle.cutoff: must be >= 1");
  if (stage == "oracle" && s.interaction != 0.0)
    throw ConfigError("oracle requires non-interacting Hamiltonian (interaction = 0)");

  const auto& m = c.method;
  if (m.k < 1) throw ConfigError("method.k: must be >= 1");
  if (stage == "train" && !kTrainMethods.count(m.name))
    throw ConfigError("method.name: '" + m.name + "' is not a training method (og, da, ga, gas, sc)");
  if ((stage == "evaluate" || stage == "scan") && !kInferenceMethods.count(m.name))
    throw ConfigError("method.name: '" + m.name + "' is not an inference method (og, pa, ga, pc, sc)");
  if (!kTrainMethods.count(m.name) && !kInferenceMethods.count(m.name))
    throw ConfigError("method.name: unknown method '" + m.name + "'");
  smoothing_kind_from_string(m.smoothing);
  if (!(m.epsilon > 0)) throw ConfigError("method.epsilon: must be positive");
  const bool region_given = !m.region.builtin.empty() || !m.region.center.empty();
  if ((needs_region(m.name) || stage == "probe-smoothing") && !region_given)
    throw ConfigError("method.region: required for smoothed canonicalization");
  if (region_given) {
    const FundamentalRegion r = build_region(c);
    if (r.dim() != d) throw ConfigError("method.region: dimension does not match the lattice");
    if (needs_region(m.name)) check_region_compatible(r, build_smoothing(c));
  }

  const SpaceGroup g = build_group(c);
  build_subset(c, g);
  if (m.name == "gas" && m.k > g.order())
    throw ConfigError("method.k: gas needs k <= |G| = " + std::to_string(g.order()));
  if (stage == "train" && (m.name == "da" || m.name == "ga") && c.sampler.walkers % m.k != 0)
    throw ConfigError("sampler.walkers: N = " + std::to_string(c.sampler.walkers) + " is not divisible by k = " +
                      std::to_string(m.k));
  if (stage == "gradstats") {
    for (const auto& name : c.stats.methods) {
      const UpdateMethod um = update_method_from_string(name);
      if ((um == UpdateMethod::da || um == UpdateMethod::ga) && c.stats.batch % m.k != 0)
        throw ConfigError("stats.batch: N = " + std::to_string(c.stats.batch) + " is not divisible by k = " +
                          std::to_string(m.k));
      if (um == UpdateMethod::gas && m.k > g.order())
        throw ConfigError("method.k: gas needs k <= |G| = " + std::to_string(g.order()));
      if (um == UpdateMethod::sc && !region_given) throw ConfigError("method.region: required for sc");
    }
    if (c.stats.replicates < 2) throw ConfigError("stats.replicates: need at least 2");
    if (c.stats.batch < 1) throw ConfigError("stats.batch: must be >= 1");
  }
  if (stage == "probe-smoothing" && c.stats.epsilons.empty())
    throw ConfigError("stats.epsilons: need at least one value");

  if (c.sampler.walkers < 1) throw ConfigError("sampler.walkers: must be >= 1");
  if (c.sampler.steps < 1) throw ConfigError("sampler.steps: must be >= 1");
  if (c.sampler.burn_in < 0) throw ConfigError("sampler.burn_in: must be non-negative");
  if (!(c.sampler.step_size > 0)) throw ConfigError("sampler.step_size: must be positive");
  if (c.training.steps < 0) throw ConfigError("training.steps: must be non-negative");
  if (!(c.training.learning_rate > 0)) throw ConfigError("training.learning_rate: must be positive");
  if (c.training.decay_every < 0) throw ConfigError("training.decay_every: must be non-negative");
  if (c.training.checkpoint_every < 0) throw ConfigError("training.checkpoint_every: must be non-negative");
  if (c.evaluation.chains < 1 || c.evaluation.samples_per_chain < 1 || c.evaluation.thin < 1 ||
      c.evaluation.burn_in < 0)
    throw ConfigError("evaluation: chains, samples_per_chain and thin must be >= 1");

  if (stage == "scan") {
    if (c.scan.resolution < 2) throw ConfigError("scan.resolution: must be >= 2");
    if (c.scan.positions.empty() == c.scan.orbit_seeds.empty())
      throw ConfigError("scan: give exactly one of positions or orbit_seeds");
    if (!c.scan.spins.empty() && c.scan.spins.size() != c.scan.positions.size())
      throw ConfigError("scan.spins: length must match scan.positions");
    for (int a : c.scan.axes)
      if (a < 0 || a >= d) throw ConfigError("scan.axes: axis " + std::to_string(a) + " out of range");
  }
}

Hamiltonian build_hamiltonian(const ExperimentConfig& c) {
  Hamiltonian h;
  h.lattice = Lattice::make(lattice_kind_from_string(c.system.lattice), c.system.scale);
  for (const auto& s : c.system.sites) h.sites.push_back(to_vec(s));
  h.depth = c.system.depth;
  h.width = c.system.width;
  h.interaction = c.system.interaction;
  h.shift = c.system.shift;
  h.image_range = c.system.image_range;
  return h;
}

SpaceGroup build_group(const ExperimentConfig& c) {
  if (!c.group.builtin.empty()) return builtin_group(c.group.builtin);
  const int d = Lattice::make(lattice_kind_from_string(c.system.lattice), 1.0).dim();
  const Lattice lat = Lattice::make(lattice_kind_from_string(c.system.lattice), c.system.scale);
  std::vector<Isometry> gens;
  for (std::size_t i = 0; i < c.group.generators.size(); ++i) {
    const auto& g = c.group.generators[i];
    Isometry iso{to_mat(g.rotation, "group.generators[" + std::to_string(i) + "].rotation"), to_vec(g.translation)};
    if (iso.rotation.rows() != d || iso.rotation.cols() != d)
      throw ConfigError("group.generators[" + std::to_string(i) + "].rotation: expected a " + std::to_string(d) +
                        "x" + std::to_string(d) + " matrix");
    try {
      validate_isometry(iso, lat);
    } catch (const ConfigError& e) {
      throw ConfigError("group.generators[" + std::to_string(i) + "]: " + e.what());
    }
    gens.push_back(std::move(iso));
  }
  return close_group(d, gens, 192, "custom");
}

FundamentalRegion build_region(const ExperimentConfig& c) {
  const auto& r = c.method.region;
  if (!r.builtin.empty()) return builtin_region(r.builtin);
  if (r.center.empty() || r.faces.empty()) throw ConfigError("method.region: give builtin or center and faces");
  FundamentalRegion out;
  out.name = "custom";
  out.center = to_vec(r.center);
  for (const auto& f : r.faces) {
    if (f.size() != r.center.size()) throw ConfigError("method.region.faces: dimension mismatch");
    out.faces.push_back(to_vec(f));
  }
  out.metric = Lattice::make(lattice_kind_from_string(c.system.lattice), 1.0).metric();
  return out;
}

SmoothingSpec build_smoothing(const ExperimentConfig& c) {
  return SmoothingSpec{smoothing_kind_from_string(c.method.smoothing), c.method.epsilon};
}

std::vector<std::size_t> build_subset(const ExperimentConfig& c, const SpaceGroup& group) {
  const std::string& sel = c.method.subset;
  std::vector<std::size_t> out;
  if (sel == "full") {
    for (std::size_t i = 0; i < group.order(); ++i) out.push_back(i);
  } else if (sel == "identity") {
    out.push_back(*group.find(Isometry::identity(group.dim())));
  } else if (sel == "generators") {
    out.push_back(*group.find(Isometry::identity(group.dim())));
    for (const auto& g : group.generators()) {
      const auto i = group.find(g);
      if (i && std::find(out.begin(), out.end(), *i) == out.end()) out.push_back(*i);
    }
  } else if (sel.rfind("subgroup:", 0) == 0) {
    const SpaceGroup sub = builtin_group(sel.substr(9));
    if (sub.dim() != group.dim()) throw ConfigError("method.subset: " + sel + " has the wrong dimension");
    for (const auto& h : sub.elements()) {
      const auto i = group.find(h);
      if (!i) throw ConfigError("method.subset: " + sel + " is not contained in the configured group");
      out.push_back(*i);
    }
  } else if (sel == "indices") {
    if (c.method.subset_indices.empty()) throw ConfigError("method.subset: empty index list");
    for (std::size_t i : c.method.subset_indices) {
      if (i >= group.order())
        throw ConfigError("method.subset: element " + std::to_string(i) + " does not exist (|G| = " +
                          std::to_string(group.order()) + ")");
      out.push_back(i);
    }
  } else {
    throw ConfigError("method.subset: unknown selector '" + sel +
                      "' (full, identity, generators, subgroup:<name> or a list of indices)");
  }
  return out;
}

std::shared_ptr<const PlaneWaveBasis> build_basis(const ExperimentConfig& c) {
  return std::make_shared<const PlaneWaveBasis>(
      Lattice::make(lattice_kind_from_string(c.system.lattice), c.system.scale), c.ansatz.cutoff);
}

Ansatz build_initial_ansatz(const ExperimentConfig& c) {
  const auto basis = build_basis(c);
  if (c.ansatz.init == "random")
    return Ansatz::random(basis, c.system.n_up, c.system.n_down, c.ansatz.jastrow, c.ansatz.init_seed,
                          c.ansatz.init_scale);
  const SpectrumResult spec = diagonalize(build_hamiltonian(c), c.oracle.cutoff);
  Ansatz exact = exact_ansatz(spec, c.system.n_up, c.system.n_down, basis, c.ansatz.jastrow);
  if (c.ansatz.init == "oracle") return exact;
  return perturb_asymmetric(exact, build_group(c), c.ansatz.perturbation, c.ansatz.init_seed);
}

}  // namespace diagsym
