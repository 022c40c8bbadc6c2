#pragma once

#include "diagsym/ansatz.hpp"

#include <cmath>

namespace fixtures {

using namespace diagsym;

inline double psi_value(const Wavefunction& psi, const Configuration& c) {
  const auto e = psi.evaluate(c, EvalLevel::value);
  return e.is_node() ? 0.0 : e.sign * std::exp(e.log_abs);
}

struct FdResult {
  Mat grad_log;  // n x d
  double laplacian_over_psi = 0.0;
};

// Fourth-order central differences of psi itself; the Laplacian is contracted
// with the physical inverse metric.
inline FdResult finite_difference(const Wavefunction& psi, const Configuration& c, double h = 1e-3) {
  const double f0 = psi_value(psi, c);
  const Mat& minv = psi.inverse_metric();
  FdResult r{Mat::Zero(c.size(), c.dim()), 0.0};
  auto shifted = [&](int i, int a, double da, int b, double db) {
    Configuration y = c;
    y.positions(i, a) += da;
    y.positions(i, b) += db;
    return psi_value(psi, y);
  };
  constexpr int steps[4] = {2, 1, -1, -2};
  constexpr double w1[4] = {-1, 8, -8, 1};  // f' ~ sum w1 f(x + s h) / 12h
  double lap = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    for (int a = 0; a < c.dim(); ++a) {
      double d1 = 0.0;
      for (int s = 0; s < 4; ++s) d1 += w1[s] * shifted(i, a, steps[s] * h, a, 0);
      r.grad_log(i, a) = d1 / (12 * h) / f0;
      for (int b = 0; b < c.dim(); ++b) {
        double d2 = 0.0;
        if (a == b) {
          d2 = (-shifted(i, a, 2 * h, a, 0) + 16 * shifted(i, a, h, a, 0) - 30 * f0 + 16 * shifted(i, a, -h, a, 0) -
                shifted(i, a, -2 * h, a, 0)) /
               (12 * h * h);
        } else {
          for (int s = 0; s < 4; ++s)
            for (int t = 0; t < 4; ++t) d2 += w1[s] * w1[t] * shifted(i, a, steps[s] * h, b, steps[t] * h);
          d2 /= 144 * h * h;
        }
        lap += minv(a, b) * d2;
      }
    }
  }
  r.laplacian_over_psi = lap / f0;
  return r;
}

// d log|psi| / d theta by central differences.
template <class Make>
Vec param_gradient_fd(const Make& make, const Vec& theta, const Configuration& c, double h = 1e-6) {
  Vec g(theta.size());
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    Vec tp = theta, tm = theta;
    tp[p] += h;
    tm[p] -= h;
    g[p] = (make(tp).evaluate(c, EvalLevel::value).log_abs - make(tm).evaluate(c, EvalLevel::value).log_abs) / (2 * h);
  }
  return g;
}

inline bool close_rel(double a, double b, double rel, double floor = 1.0) {
  return std::abs(a - b) <= rel * std::max(floor, std::max(std::abs(a), std::abs(b)));
}

}  // namespace fixtures
