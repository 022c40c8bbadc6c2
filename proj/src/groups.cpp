#include "diagsym/groups.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace diagsym {

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::chain: return "chain";
    case LatticeKind::square: return "square";
    case LatticeKind::hexagonal: return "hexagonal";
    case LatticeKind::cubic: return "cubic";
  }
  return "unknown";
}

LatticeKind lattice_kind_from_string(std::string_view name) {
  if (name == "chain") return LatticeKind::chain;
  if (name == "square") return LatticeKind::square;
  if (name == "hexagonal") return LatticeKind::hexagonal;
  if (name == "cubic") return LatticeKind::cubic;
  throw ConfigError("unknown lattice '" + std::string(name) + "' (expected chain, square, hexagonal or cubic)");
}

Lattice Lattice::make(LatticeKind kind, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("lattice scale must be positive");
  Lattice lat;
  lat.kind = kind;
  switch (kind) {
    case LatticeKind::chain:
      lat.basis = Mat::Constant(1, 1, scale);
      break;
    case LatticeKind::square:
      lat.basis = scale * Mat::Identity(2, 2);
      break;
    case LatticeKind::hexagonal:
      lat.basis.resize(2, 2);
      lat.basis << 1.0, -0.5, 0.0, std::sqrt(3.0) / 2.0;
      lat.basis *= scale;
      break;
    case LatticeKind::cubic:
      lat.basis = scale * Mat::Identity(3, 3);
      break;
  }
  return lat;
}

std::vector<IVec> Lattice::shortest_star() const {
  const int d = dim();
  const Mat minv = inverse_metric();
  std::vector<IVec> out;
  double best = std::numeric_limits<double>::infinity();
  IVec k(d);
  // Entries in [-2,2] are plenty for the built-in lattices.
  const int range = 2;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 2 * range + 1;
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int i = 0; i < d; ++i) {
      k[i] = rem % (2 * range + 1) - range;
      rem /= 2 * range + 1;
    }
    // keep one of each +/- pair: first nonzero component positive
    int first = 0;
    while (first < d && k[first] == 0) ++first;
    if (first == d || k[first] < 0) continue;
    const Vec kd = k.cast<double>();
    const double n2 = kd.dot(minv * kd);
    if (n2 < best - 1e-9) {
      best = n2;
      out.clear();
    }
    if (std::abs(n2 - best) <= 1e-9) out.push_back(k);
  }
  return out;
}

Isometry Isometry::identity(int dim) { return {Mat::Identity(dim, dim), Vec::Zero(dim)}; }

Isometry compose(const Isometry& g, const Isometry& h) {
  return {g.rotation * h.rotation, g.rotation * h.translation + g.translation};
}

double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // x slightly below an integer can round up
  return y;
}

Vec wrap(const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = wrap_unit(x[i]);
  return y;
}

Vec min_image(const Vec& delta) { return delta.array() - delta.array().round(); }

double torus_distance(const Vec& a, const Vec& b) { return min_image(a - b).cwiseAbs().maxCoeff(); }

Isometry canonical(const Isometry& g) {
  Isometry out = g;
  for (Eigen::Index i = 0; i < out.translation.size(); ++i) {
    double t = wrap_unit(g.translation[i]);
    if (t > 1.0 - 1e-12 || t < 1e-15) t = 0.0;
    out.translation[i] = t;
  }
  out.rotation = g.rotation.array().round().matrix();
  return out;
}

Isometry inverse(const Isometry& g) {
  Mat ainv = g.rotation.inverse().array().round().matrix();
  return canonical({ainv, -(ainv * g.translation)});
}

bool same_on_torus(const Isometry& g, const Isometry& h, double tol) {
  if (g.dim() != h.dim()) return false;
  if ((g.rotation - h.rotation).cwiseAbs().maxCoeff() > tol) return false;
  if (g.dim() == 0) return true;
  return min_image(g.translation - h.translation).cwiseAbs().maxCoeff() <= tol;
}

bool is_identity_on_torus(const Isometry& g, double tol) { return same_on_torus(g, Isometry::identity(g.dim()), tol); }

bool canonical_less(const Isometry& g, const Isometry& h, double tol) {
  const Isometry a = canonical(g);
  const Isometry b = canonical(h);
  for (Eigen::Index i = 0; i < a.rotation.size(); ++i) {
    const double x = a.rotation.data()[i], y = b.rotation.data()[i];
    if (std::abs(x - y) > tol) return x < y;
  }
  for (Eigen::Index i = 0; i < a.translation.size(); ++i) {
    const double x = a.translation[i], y = b.translation[i];
    if (std::abs(x - y) > tol) return x < y;
  }
  return false;
}

void validate_isometry(const Isometry& g, const Lattice& lattice) {
  const int d = lattice.dim();
  if (g.rotation.rows() != d || g.rotation.cols() != d || g.translation.size() != d)
    throw ConfigError("isometry dimension does not match the lattice dimension " + std::to_string(d));
  for (Eigen::Index i = 0; i < g.rotation.size(); ++i) {
    const double a = g.rotation.data()[i];
    if (std::abs(a - std::round(a)) > 1e-12 || std::abs(a) > 1.0 + 1e-12)
      throw ConfigError("isometry rotation entries must be -1, 0 or 1 in lattice coordinates");
  }
  if (!g.translation.allFinite()) throw ConfigError("isometry translation must be finite");
  const Mat r = lattice.basis * g.rotation * lattice.basis.inverse();
  const double err = (r.transpose() * r - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > 1e-9) throw ConfigError("isometry rotation is not orthogonal on the " + to_string(lattice.kind) + " lattice");
}

SpaceGroup::SpaceGroup(int dim, std::vector<Isometry> elements, std::vector<Isometry> generators, std::string name)
    : dim_(dim), elements_(std::move(elements)), generators_(std::move(generators)), name_(std::move(name)) {}

std::optional<std::size_t> SpaceGroup::find(const Isometry& g, double tol) const {
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (same_on_torus(elements_[i], g, tol)) return i;
  return std::nullopt;
}

std::vector<Isometry> SpaceGroup::subset(std::span<const std::size_t> indices) const {
  std::vector<Isometry> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= elements_.size()) throw ConfigError("group element index " + std::to_string(i) + " out of range");
    out.push_back(elements_[i]);
  }
  return out;
}

bool SpaceGroup::satisfies_axioms(double tol) const {
  if (elements_.empty() || !find(Isometry::identity(dim_), tol)) return false;
  for (const auto& g : elements_) {
    if (!find(inverse(g), tol)) return false;
    for (const auto& h : elements_)
      if (!find(compose(g, h), tol)) return false;
  }
  return true;
}

SpaceGroup close_group(int dim, std::span<const Isometry> generators, std::size_t max_order, std::string name) {
  std::vector<Isometry> gens;
  for (const auto& g : generators) {
    if (g.dim() != dim || g.rotation.rows() != dim || g.rotation.cols() != dim)
      throw ConfigError("generator dimension mismatch (expected " + std::to_string(dim) + ")");
    gens.push_back(canonical(g));
  }
  std::vector<Isometry> elements{Isometry::identity(dim)};
  auto known = [&](const Isometry& g) {
    return std::any_of(elements.begin(), elements.end(), [&](const Isometry& e) { return same_on_torus(e, g); });
  };
  std::vector<Isometry> frontier{elements.front()};
  while (!frontier.empty()) {
    std::vector<Isometry> next;
    for (const auto& f : frontier) {
      for (const auto& g : gens) {
        Isometry c = canonical(compose(f, g));
        if (known(c)) continue;
        if (std::any_of(next.begin(), next.end(), [&](const Isometry& e) { return same_on_torus(e, c); })) continue;
        next.push_back(c);
      }
    }
    std::sort(next.begin(), next.end(), [](const Isometry& a, const Isometry& b) { return canonical_less(a, b); });
    for (const auto& c : next) {
      elements.push_back(c);
      if (elements.size() > max_order) {
        std::ostringstream msg;
        msg << "group closure exceeded max_order " << max_order << "; elements found so far:";
        for (std::size_t i = 0; i < std::min<std::size_t>(elements.size(), 12); ++i) {
          msg << " [A=" << elements[i].rotation.reshaped().transpose() << " b=" << elements[i].translation.transpose()
              << "]";
        }
        msg << (elements.size() > 12 ? " ..." : "");
        throw ConfigError(msg.str());
      }
    }
    frontier = std::move(next);
  }
  return SpaceGroup(dim, std::move(elements), std::move(gens), std::move(name));
}

SpaceGroup build_g_tilde(const SpaceGroup& group) {
  std::vector<Isometry> gens;
  for (const auto& g : group.generators()) gens.push_back({g.rotation, Vec::Zero(group.dim())});
  // Generators alone may not carry every rotation when the group was assembled by hand.
  for (const auto& g : group.elements()) gens.push_back({g.rotation, Vec::Zero(group.dim())});
  std::vector<Isometry> unique;
  for (const auto& g : gens)
    if (std::none_of(unique.begin(), unique.end(), [&](const Isometry& u) { return same_on_torus(u, g); }))
      unique.push_back(g);
  return close_group(group.dim(), unique, std::max<std::size_t>(group.order(), 1),
                     group.name().empty() ? std::string{} : group.name() + "~");
}

std::vector<SpaceGroup> subgroups(const SpaceGroup& group) {
  std::vector<SpaceGroup> found;
  auto key = [](const SpaceGroup& s, const SpaceGroup& parent) {
    std::vector<std::size_t> idx;
    for (const auto& e : s.elements()) idx.push_back(*parent.find(e));
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  std::vector<std::vector<std::size_t>> keys;
  auto add = [&](std::vector<Isometry> gens) {
    SpaceGroup s = close_group(group.dim(), gens, group.order());
    auto k = key(s, group);
    if (std::find(keys.begin(), keys.end(), k) != keys.end()) return;
    keys.push_back(k);
    found.push_back(std::move(s));
  };
  add({});
  const auto& el = group.elements();
  for (std::size_t i = 0; i < el.size(); ++i) {
    add({el[i]});
    for (std::size_t j = i + 1; j < el.size(); ++j) add({el[i], el[j]});
  }
  std::stable_sort(found.begin(), found.end(), [](const SpaceGroup& a, const SpaceGroup& b) { return a.order() < b.order(); });
  return found;
}

namespace {

Isometry iso(std::initializer_list<double> a, std::initializer_list<double> b) {
  const int d = static_cast<int>(b.size());
  Isometry g{Mat(d, d), Vec(d)};
  auto it = a.begin();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g.rotation(i, j) = *it++;
  int i = 0;
  for (double v : b) g.translation[i++] = v;
  return g;
}

struct BuiltinDef {
  BuiltinGroupInfo info;
  int dim;
  std::vector<Isometry> generators;
};

const std::vector<BuiltinDef>& builtin_table() {
  static const std::vector<BuiltinDef> table = [] {
    std::vector<BuiltinDef> t;
    t.push_back({{"trivial-1d", LatticeKind::chain, "identity only"}, 1, {}});
    t.push_back({{"trivial-2d", LatticeKind::square, "identity only"}, 2, {}});
    t.push_back({{"trivial-3d", LatticeKind::cubic, "identity only"}, 3, {}});
    t.push_back({{"1d-reflection", LatticeKind::chain, "x -> -x"}, 1, {iso({-1}, {0})}});
    t.push_back({{"1d-half-translation", LatticeKind::chain, "x -> x + 1/2"}, 1, {iso({1}, {0.5})}});
    t.push_back({{"1d-reflection-half", LatticeKind::chain, "x -> -x and x -> x + 1/2"}, 1,
                 {iso({-1}, {0}), iso({1}, {0.5})}});
    t.push_back({{"p2mm", LatticeKind::square, "mirrors x -> -x and y -> -y"}, 2,
                 {iso({-1, 0, 0, 1}, {0, 0}), iso({1, 0, 0, -1}, {0, 0})}});
    t.push_back({{"p4mm", LatticeKind::square, "square point group (order 8)"}, 2,
                 {iso({0, -1, 1, 0}, {0, 0}), iso({-1, 0, 0, 1}, {0, 0})}});
    t.push_back({{"p4mm-centred", LatticeKind::square, "square point group with (1/2,1/2) translation"}, 2,
                 {iso({0, -1, 1, 0}, {0, 0}), iso({-1, 0, 0, 1}, {0, 0}), iso({1, 0, 0, 1}, {0.5, 0.5})}});
    t.push_back({{"p6mm", LatticeKind::hexagonal, "hexagonal point group (order 12)"}, 2,
                 {iso({1, -1, 1, 0}, {0, 0}), iso({1, -1, 0, -1}, {0, 0})}});
    t.push_back({{"pm-3m", LatticeKind::cubic, "full cubic point group (order 48)"}, 3,
                 {iso({0, -1, 0, 1, 0, 0, 0, 0, 1}, {0, 0, 0}), iso({0, 0, 1, 1, 0, 0, 0, 1, 0}, {0, 0, 0}),
                  iso({-1, 0, 0, 0, -1, 0, 0, 0, -1}, {0, 0, 0})}});
    t.push_back({{"fm-3m", LatticeKind::cubic, "cubic point group with face-centring translations (order 192)"}, 3,
                 {iso({0, -1, 0, 1, 0, 0, 0, 0, 1}, {0, 0, 0}), iso({0, 0, 1, 1, 0, 0, 0, 1, 0}, {0, 0, 0}),
                  iso({-1, 0, 0, 0, -1, 0, 0, 0, -1}, {0, 0, 0}), iso({1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0.5, 0.5}),
                  iso({1, 0, 0, 0, 1, 0, 0, 0, 1}, {0.5, 0, 0.5})}});
    return t;
  }();
  return table;
}

const BuiltinDef& lookup(std::string_view name) {
  for (const auto& def : builtin_table())
    if (def.info.name == name) return def;
  std::string known;
  for (const auto& def : builtin_table()) known += (known.empty() ? "" : ", ") + def.info.name;
  throw ConfigError("unknown built-in group '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace

std::vector<BuiltinGroupInfo> builtin_groups() {
  std::vector<BuiltinGroupInfo> out;
  for (const auto& def : builtin_table()) out.push_back(def.info);
  return out;
}

SpaceGroup builtin_group(std::string_view name) {
  const auto& def = lookup(name);
  return close_group(def.dim, def.generators, 192, def.info.name);
}

LatticeKind builtin_group_lattice(std::string_view name) { return lookup(name).info.lattice; }

Configuration apply_diagonal(const Isometry& g, const Configuration& c) {
  if (c.dim() != g.dim()) throw ConfigError("configuration dimension does not match the isometry");
  Configuration out = c;
  for (int i = 0; i < c.size(); ++i) out.positions.row(i) = wrap(g.apply(c.positions.row(i).transpose())).transpose();
  return out;
}

namespace {

bool maps_onto(const Configuration& image, const Configuration& c, double tol) {
  const int n = c.size();
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    bool matched = false;
    for (int j = 0; j < n && !matched; ++j) {
      if (used[j] || image.spins[i] != c.spins[j]) continue;
      if (torus_distance(image.positions.row(i).transpose(), c.positions.row(j).transpose()) <= tol) {
        used[j] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace

std::optional<std::size_t> first_symmetry_violation(const SpaceGroup& group, const Configuration& c, double tol) {
  if (c.dim() != group.dim()) throw ConfigError("configuration dimension does not match the group");
  for (std::size_t k = 0; k < group.order(); ++k)
    if (!maps_onto(apply_diagonal(group[k], c), c, tol)) return k;
  return std::nullopt;
}

bool is_symmetric_configuration(const SpaceGroup& group, const Configuration& c, double tol) {
  return !first_symmetry_violation(group, c, tol).has_value();
}

Configuration orbit_configuration(const SpaceGroup& group, std::span<const Vec> seeds, Spin spin, double tol) {
  std::vector<Vec> pts;
  for (const auto& s : seeds) {
    if (s.size() != group.dim()) throw ConfigError("orbit seed dimension does not match the group");
    for (const auto& g : group.elements()) {
      Vec y = wrap(g.apply(s));
      if (std::none_of(pts.begin(), pts.end(), [&](const Vec& p) { return torus_distance(p, y) <= tol; }))
        pts.push_back(y);
    }
  }
  Configuration c;
  c.positions.resize(static_cast<Eigen::Index>(pts.size()), group.dim());
  for (std::size_t i = 0; i < pts.size(); ++i) c.positions.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  c.spins.assign(pts.size(), spin);
  return c;
}

}  // namespace diagsym
