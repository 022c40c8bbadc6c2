#pragma once

#include "diagsym/common.hpp"
#include "diagsym/groups.hpp"

#include <string>
#include <vector>

namespace diagsym {

// Step functions s: [0,1] -> [0,1], s(0)=0, s(1)=1, symmetric about 1/2.
// spline2 is piecewise cubic with continuous second derivative; smooth_inf is C-infinity.
enum class SmoothingKind { spline2, smooth_inf };

std::string to_string(SmoothingKind kind);
SmoothingKind smoothing_kind_from_string(std::string_view name);

struct Derivs {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

Derivs step_derivs(SmoothingKind kind, double w);
inline double step(SmoothingKind kind, double w) { return step_derivs(kind, w).value; }

struct SmoothingSpec {
  SmoothingKind kind = SmoothingKind::spline2;
  double epsilon = 0.05;
};

// lambda(w) = s(1 - w/eps) on [0, eps], 1 below, 0 above. Derivatives are in w.
Derivs lambda_eps_derivs(const SmoothingSpec& spec, double w);
inline double lambda_eps(const SmoothingSpec& spec, double w) { return lambda_eps_derivs(spec, w).value; }

// Convex polytope given by a center c0 and face offsets n_l: the face l is the
// hyperplane through c0 + n_l orthogonal to n_l (in `metric`).
struct FundamentalRegion {
  std::string name;
  Vec center;
  std::vector<Vec> faces;
  Mat metric;  // inner product for normals, a multiple of the lattice metric

  int dim() const { return static_cast<int>(center.size()); }
  double inradius() const;
  bool contains(const Vec& x, double tol = 1e-12) const;

  // Simplex with the given vertices (lattice coordinates); c0 is its incenter.
  static FundamentalRegion simplex(std::string name, const std::vector<Vec>& vertices, const Mat& metric);
  static FundamentalRegion box(std::string name, const Vec& lower, const Vec& upper, const Mat& metric);
};

FundamentalRegion builtin_region(std::string_view name);
std::vector<std::string> builtin_region_names();

struct DistanceEval {
  double value = 0.0;
  Vec gradient;            // d/dx, lattice coordinates
  double laplacian = 0.0;  // sum_ab M_ab d^2/dx_a dx_b with M = laplacian_metric
};

// Smoothed distance from x to g(region): sum_l stilde(w_l - 1)^2 with
// stilde(w) = w s(w) and w_l the normalised projection on face l.
double distance_to_region(const FundamentalRegion& region, SmoothingKind kind, const Vec& x, const Isometry& g);
DistanceEval distance_to_region_derivs(const FundamentalRegion& region, SmoothingKind kind, const Vec& x,
                                       const Isometry& g, const Mat& laplacian_metric);

// h(x) = A x + b + shift for the group element `element`; shift is integer.
struct BoundaryMember {
  std::size_t element = 0;
  Vec shift;
  double distance = 0.0;
  double weight = 0.0;
};

// All translates h of group elements with d(h(x), region) <= eps, and their
// normalised weights lambda(d_h)/sum. Shifts are relative to the input x.
std::vector<BoundaryMember> boundary_set(const FundamentalRegion& region, const SmoothingSpec& spec,
                                         const SpaceGroup& group, const Vec& x, int shell = 1);

void check_region_compatible(const FundamentalRegion& region, const SmoothingSpec& spec);

}  // namespace diagsym
