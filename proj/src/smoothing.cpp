#include "diagsym/smoothing.hpp"

#include <cmath>

namespace diagsym {

std::string to_string(SmoothingKind kind) { return kind == SmoothingKind::spline2 ? "spline2" : "smooth_inf"; }

SmoothingKind smoothing_kind_from_string(std::string_view name) {
  if (name == "spline2") return SmoothingKind::spline2;
  if (name == "smooth_inf" || name == "smooth-inf") return SmoothingKind::smooth_inf;
  throw ConfigError("unknown smoothing '" + std::string(name) + "' (expected spline2 or smooth_inf)");
}

namespace {

Derivs spline2(double w) {
  if (w <= 0.0) return {0.0, 0.0, 0.0};
  if (w >= 1.0) return {1.0, 0.0, 0.0};
  if (w < 1.0 / 3.0) return {4.5 * w * w * w, 13.5 * w * w, 27.0 * w};
  const double u = 1.0 - w;
  if (w < 2.0 / 3.0) {
    const double v = 2.0 - 3.0 * w;
    return {-4.5 * u * u * u + 0.5 * v * v * v + 1.0, 13.5 * u * u - 4.5 * v * v, -27.0 * u + 27.0 * v};
  }
  return {-4.5 * u * u * u + 1.0, 13.5 * u * u, -27.0 * u};
}

Derivs smooth_inf(double w) {
  if (w <= 0.0) return {0.0, 0.0, 0.0};
  if (w >= 1.0) return {1.0, 0.0, 0.0};
  const double z = 1.0 / w - 1.0 / (1.0 - w);
  // beyond this s is 0 or 1 to double precision and the derivatives underflow
  if (z > 700.0) return {0.0, 0.0, 0.0};
  if (z < -700.0) return {1.0, 0.0, 0.0};
  const double s = 1.0 / (1.0 + std::exp(z));
  const double c = std::cosh(0.5 * z);
  const double q = 1.0 / (4.0 * c * c);  // s(1-s) without cancellation
  const double a = 1.0 / (w * w) + 1.0 / ((1.0 - w) * (1.0 - w));
  const double da = -2.0 / (w * w * w) + 2.0 / ((1.0 - w) * (1.0 - w) * (1.0 - w));
  const double first = q * a;
  const double second = (1.0 - 2.0 * s) * first * a + q * da;
  return {s, first, second};
}

}  // namespace

Derivs step_derivs(SmoothingKind kind, double w) {
  return kind == SmoothingKind::spline2 ? spline2(w) : smooth_inf(w);
}

Derivs lambda_eps_derivs(const SmoothingSpec& spec, double w) {
  const double eps = spec.epsilon;
  if (w <= 0.0) return {1.0, 0.0, 0.0};
  if (w >= eps) return {0.0, 0.0, 0.0};
  const Derivs s = step_derivs(spec.kind, 1.0 - w / eps);
  return {s.value, -s.first / eps, s.second / (eps * eps)};
}

double FundamentalRegion::inradius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& n : faces) r = std::min(r, std::sqrt(n.dot(metric * n)));
  return r;
}

bool FundamentalRegion::contains(const Vec& x, double tol) const {
  for (const auto& n : faces) {
    const double w = (x - center).dot(metric * n) / n.dot(metric * n);
    if (w > 1.0 + tol) return false;
  }
  return true;
}

namespace {

// (d-1)-dimensional measure of the simplex spanned by pts, in the metric.
double facet_measure(const std::vector<Vec>& pts, const Mat& metric) {
  if (pts.size() <= 1) return 1.0;
  Mat e(pts[0].size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t j = 1; j < pts.size(); ++j) e.col(static_cast<Eigen::Index>(j - 1)) = pts[j] - pts[0];
  return std::sqrt(std::max(0.0, (e.transpose() * metric * e).determinant()));
}

}  // namespace

FundamentalRegion FundamentalRegion::simplex(std::string name, const std::vector<Vec>& vertices, const Mat& metric) {
  const std::size_t nv = vertices.size();
  const int d = static_cast<int>(vertices.at(0).size());
  if (nv != static_cast<std::size_t>(d + 1)) throw ConfigError("simplex region needs dim+1 vertices");
  std::vector<double> weight(nv);
  Vec c = Vec::Zero(d);
  double total = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<Vec> others;
    for (std::size_t j = 0; j < nv; ++j)
      if (j != i) others.push_back(vertices[j]);
    weight[i] = facet_measure(others, metric);
    c += weight[i] * vertices[i];
    total += weight[i];
  }
  c /= total;
  FundamentalRegion r{std::move(name), c, {}, metric};
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<Vec> others;
    for (std::size_t j = 0; j < nv; ++j)
      if (j != i) others.push_back(vertices[j]);
    Vec foot = others[0];
    if (others.size() > 1) {
      Mat e(d, static_cast<Eigen::Index>(others.size() - 1));
      for (std::size_t j = 1; j < others.size(); ++j) e.col(static_cast<Eigen::Index>(j - 1)) = others[j] - others[0];
      const Vec alpha = (e.transpose() * metric * e).ldlt().solve(e.transpose() * metric * (c - others[0]));
      foot = others[0] + e * alpha;
    }
    r.faces.push_back(foot - c);
  }
  return r;
}

FundamentalRegion FundamentalRegion::box(std::string name, const Vec& lower, const Vec& upper, const Mat& metric) {
  const int d = static_cast<int>(lower.size());
  FundamentalRegion r{std::move(name), 0.5 * (lower + upper), {}, metric};
  for (int a = 0; a < d; ++a) {
    Vec n = Vec::Zero(d);
    n[a] = 0.5 * (upper[a] - lower[a]);
    r.faces.push_back(n);
    r.faces.push_back(-n);
  }
  return r;
}

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

}  // namespace

std::vector<std::string> builtin_region_names() {
  return {"unit-interval", "half-interval", "quarter-interval", "unit-square", "p4mm-triangle", "p6mm-triangle",
          "unit-cube"};
}

FundamentalRegion builtin_region(std::string_view name) {
  const Mat one = Mat::Identity(1, 1);
  const Mat sq = Mat::Identity(2, 2);
  if (name == "unit-interval") return FundamentalRegion::box("unit-interval", v({0}), v({1}), one);
  if (name == "half-interval") return FundamentalRegion::box("half-interval", v({0}), v({0.5}), one);
  if (name == "quarter-interval") return FundamentalRegion::box("quarter-interval", v({0}), v({0.25}), one);
  if (name == "unit-square") return FundamentalRegion::box("unit-square", v({0, 0}), v({1, 1}), sq);
  if (name == "unit-cube")
    return FundamentalRegion::box("unit-cube", v({0, 0, 0}), v({1, 1, 1}), Mat::Identity(3, 3));
  if (name == "p4mm-triangle")
    return FundamentalRegion::simplex("p4mm-triangle", {v({0, 0}), v({0.5, 0}), v({0.5, 0.5})}, sq);
  if (name == "p6mm-triangle") {
    const Mat hex = Lattice::make(LatticeKind::hexagonal, 1.0).metric();
    return FundamentalRegion::simplex("p6mm-triangle", {v({0, 0}), v({0.5, 0}), v({2.0 / 3.0, 1.0 / 3.0})}, hex);
  }
  throw ConfigError("unknown built-in region '" + std::string(name) + "'");
}

namespace {

struct FaceTerm {
  Vec a;  // gradient of w_l in y
  double w;
};

DistanceEval distance_in_image(const FundamentalRegion& region, SmoothingKind kind, const Vec& y, bool derivs,
                               const Mat& lmetric) {
  DistanceEval out;
  const int d = region.dim();
  if (derivs) out.gradient = Vec::Zero(d);
  for (const auto& n : region.faces) {
    const Vec gn = region.metric * n;
    const double nn = n.dot(gn);
    const double w = (y - region.center).dot(gn) / nn - 1.0;
    const Derivs s = step_derivs(kind, w);
    const double st = w * s.value;
    out.value += st * st;
    if (derivs && w > 0.0) {
      const double st1 = s.value + w * s.first;
      const double st2 = 2.0 * s.first + w * s.second;
      const Vec a = gn / nn;
      out.gradient += 2.0 * st * st1 * a;
      out.laplacian += 2.0 * (st1 * st1 + st * st2) * a.dot(lmetric * a);
    }
  }
  return out;
}

}  // namespace

double distance_to_region(const FundamentalRegion& region, SmoothingKind kind, const Vec& x, const Isometry& g) {
  // d(x, g(P)) = d(g^{-1} x, P)
  const Isometry gi = inverse(g);
  Isometry exact{gi.rotation, -(gi.rotation * g.translation)};
  return distance_in_image(region, kind, exact.apply(x), false, Mat()).value;
}

DistanceEval distance_to_region_derivs(const FundamentalRegion& region, SmoothingKind kind, const Vec& x,
                                       const Isometry& g, const Mat& laplacian_metric) {
  const Mat ainv = g.rotation.inverse().array().round().matrix();
  const Vec y = ainv * (x - g.translation);
  DistanceEval e = distance_in_image(region, kind, y, true, laplacian_metric);
  // isometries preserve the metric, so only the gradient needs mapping back
  e.gradient = ainv.transpose() * e.gradient;
  return e;
}

void check_region_compatible(const FundamentalRegion& region, const SmoothingSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw ConfigError("smoothing epsilon must be positive");
  const double r = region.inradius();
  if (spec.epsilon >= r)
    throw ConfigError("smoothing epsilon " + std::to_string(spec.epsilon) + " must be below the inradius " +
                      std::to_string(r) + " of region '" + region.name + "'");
}

std::vector<BoundaryMember> boundary_set(const FundamentalRegion& region, const SmoothingSpec& spec,
                                         const SpaceGroup& group, const Vec& x, int shell) {
  const int d = group.dim();
  if (x.size() != d || region.dim() != d) throw ConfigError("boundary_set: dimension mismatch");
  const Vec m = x.array().floor().matrix();
  const Vec xr = x - m;
  const Mat none;
  std::vector<BoundaryMember> out;
  double total = 0.0;
  int ncand = 1;
  for (int i = 0; i < d; ++i) ncand *= 2 * shell + 1;
  for (std::size_t k = 0; k < group.order(); ++k) {
    const Isometry& g = group[k];
    const Vec y = g.apply(xr);
    const Vec base = -y.array().floor().matrix();
    for (int c = 0; c < ncand; ++c) {
      Vec t = base;
      int rem = c;
      for (int i = 0; i < d; ++i) {
        t[i] += rem % (2 * shell + 1) - shell;
        rem /= 2 * shell + 1;
      }
      const Vec hy = y + t;
      const double dist = distance_in_image(region, spec.kind, hy, false, none).value;
      if (dist > spec.epsilon) continue;
      const double lam = lambda_eps(spec, dist);
      // shift relative to the unreduced x: A(xr) + b + t = A x + b + (t - A m)
      out.push_back({k, t - g.rotation * m, dist, lam});
      total += lam;
    }
  }
  if (!(total > 0.0)) throw NumericalError("boundary_set: no member has positive weight (is the region a fundamental domain?)");
  for (auto& mbr : out) mbr.weight /= total;
  return out;
}

}  // namespace diagsym
