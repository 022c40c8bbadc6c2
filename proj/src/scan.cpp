#include "diagsym/scan.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace diagsym {

namespace {

std::vector<int> default_axes(int d, std::vector<int> axes) {
  if (axes.empty())
    for (int a = 0; a < d; ++a) axes.push_back(a);
  for (int a : axes)
    if (a < 0 || a >= d) throw ConfigError("scan axis " + std::to_string(a) + " out of range");
  return axes;
}

}  // namespace

Vec ScanGrid::displacement(std::size_t index) const {
  Vec t = Vec::Zero(base.dim());
  const auto r = static_cast<std::size_t>(resolution);
  for (int j = static_cast<int>(axes.size()) - 1; j >= 0; --j) {
    t[axes[static_cast<std::size_t>(j)]] = static_cast<double>(index % r) / static_cast<double>(resolution - 1);
    index /= r;
  }
  return t;
}

std::size_t ScanGrid::index_of(const std::vector<int>& steps) const {
  std::size_t idx = 0;
  for (int s : steps) idx = idx * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(s);
  return idx;
}

ScanGrid scan_unchecked(const Wavefunction& psi, const Configuration& base, int resolution, std::vector<int> axes) {
  if (resolution < 2) throw ConfigError("scan resolution must be >= 2");
  ScanGrid g;
  g.base = base;
  g.axes = default_axes(base.dim(), std::move(axes));
  g.resolution = resolution;
  std::size_t total = 1;
  for (std::size_t i = 0; i < g.axes.size(); ++i) total *= static_cast<std::size_t>(resolution);
  g.values.resize(total);
  Configuration c = base;
  for (std::size_t i = 0; i < total; ++i) {
    const Vec t = g.displacement(i);
    for (int e = 0; e < base.size(); ++e) c.positions.row(e) = base.positions.row(e) + t.transpose();
    const auto ev = psi.evaluate(c, EvalLevel::value);
    if (ev.is_node()) {
      g.values[i] = std::numeric_limits<double>::quiet_NaN();
      ++g.nodes;
    } else {
      g.values[i] = 2.0 * ev.log_abs;
    }
  }
  return g;
}

ScanGrid scan(const Wavefunction& psi, const SpaceGroup& group, const Configuration& base, int resolution,
              std::vector<int> axes) {
  const SpaceGroup tilde = build_g_tilde(group);
  if (const auto bad = first_symmetry_violation(tilde, base, 1e-9)) {
    const Isometry& g = tilde[*bad];
    std::ostringstream msg;
    msg << "scan base configuration is not symmetric under point-group element " << *bad << " (rotation "
        << g.rotation.reshaped<Eigen::RowMajor>().transpose() << ")";
    throw ConfigError(msg.str());
  }
  return scan_unchecked(psi, base, resolution, std::move(axes));
}

SymmetryErrorMap symmetry_error(const ScanGrid& grid, const SpaceGroup& group, double tol) {
  SymmetryErrorMap out;
  const int d = grid.base.dim();
  if (group.dim() != d) throw ConfigError("group dimension does not match the scan");
  const double step = 1.0 / static_cast<double>(grid.resolution - 1);
  std::vector<bool> scanned(static_cast<std::size_t>(d), false);
  for (int a : grid.axes) scanned[static_cast<std::size_t>(a)] = true;
  out.error.assign(grid.size(), 0.0);
  out.per_element.assign(group.order(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::isnan(grid.values[i])) out.error[i] = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 0; k < group.order(); ++k) {
    const Isometry& g = group[k];
    // the relation is only testable if g keeps t inside the scanned plane and on the grid
    bool usable = true;
    for (int a = 0; a < d && usable; ++a) {
      if (scanned[static_cast<std::size_t>(a)]) {
        const double s = g.translation[a] / step;
        if (std::abs(s - std::round(s)) > 1e-9) usable = false;
        continue;
      }
      if (std::abs(min_image(Vec::Constant(1, g.translation[a]))[0]) > 1e-12) usable = false;
      for (int b : grid.axes)
        if (g.rotation(a, b) != 0.0) usable = false;
    }
    if (!usable) continue;
    ++out.relations_checked;
    double worst = 0.0;
    std::vector<int> steps(grid.axes.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec t = grid.displacement(i);
      const Vec gt = g.apply(t);
      for (std::size_t j = 0; j < grid.axes.size(); ++j) {
        long s = std::lround(gt[grid.axes[j]] / step);
        s %= grid.resolution - 1;
        if (s < 0) s += grid.resolution - 1;
        steps[j] = static_cast<int>(s);
      }
      const double a = grid.values[i], b = grid.values[grid.index_of(steps)];
      if (std::isnan(a) || std::isnan(b)) continue;
      const double e = std::abs(b - a);
      worst = std::max(worst, e);
      if (!std::isnan(out.error[i])) out.error[i] = std::max(out.error[i], e);
    }
    out.per_element[k] = worst;
    if (worst <= tol) ++out.relations_satisfied;
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (double e : out.error) {
    if (std::isnan(e)) {
      ++out.nodes;
      continue;
    }
    out.max = std::max(out.max, e);
    sum += e;
    ++count;
  }
  out.mean = count ? sum / static_cast<double>(count) : 0.0;
  return out;
}

void write_scan_csv(std::ostream& os, const ScanGrid& grid, const SymmetryErrorMap* err) {
  os << "# axes:";
  for (int a : grid.axes) os << ' ' << a;
  os << "\n# resolution: " << grid.resolution << "\n# base:";
  for (int i = 0; i < grid.base.size(); ++i) {
    os << " (";
    for (int a = 0; a < grid.base.dim(); ++a) os << (a ? "," : "") << std::setprecision(17) << grid.base.positions(i, a);
    os << (grid.base.spins[static_cast<std::size_t>(i)] == Spin::up ? ";up)" : ";down)");
  }
  os << "\n";
  for (std::size_t j = 0; j < grid.axes.size(); ++j) os << "t" << j << ",";
  os << "log_psi2" << (err ? ",symmetry_error" : "") << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec t = grid.displacement(i);
    for (int a : grid.axes) os << t[a] << ",";
    if (std::isnan(grid.values[i])) os << "node";
    else os << grid.values[i];
    if (err) {
      os << ",";
      if (std::isnan(err->error[i])) os << "node";
      else os << err->error[i];
    }
    os << "\n";
  }
}

}  // namespace diagsym
