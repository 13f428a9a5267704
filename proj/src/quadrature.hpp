#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wickfbm {

/// Raised when node doubling fails to stabilize an integral within the
/// requested tolerance before hitting the node budget.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the m-point Gauss-Legendre rule; rules are computed once and cached.
const GaussLegendreRule& gauss_legendre(int m);

struct QuadResult {
  double value = 0.0;
  int nodes = 0;          // node count of the accepted pass
  double est_error = 0.0; // |last - previous| of the doubling sequence
  bool converged = false;
};

/// Fixed m-point Gauss-Legendre estimate of the integral of f over [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int m) {
  const GaussLegendreRule& rule = gauss_legendre(m);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    sum += rule.weights[j] * f(mid + half * rule.nodes[j]);
  }
  return half * sum;
}

/// Gauss-Legendre with node doubling: accepts once two successive passes agree
/// to rel_tol (relative to max(|value|, abs_floor)). Does not throw; the
/// caller decides whether a non-converged result is an error.
template <class F>
QuadResult integrate_doubling(F&& f, double a, double b, double rel_tol,
                              double abs_floor = 1e-300, int m0 = 8,
                              int m_max = 4096) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  double prev = integrate_gl(f, a, b, m0);
  for (int m = 2 * m0; m <= m_max; m *= 2) {
    const double cur = integrate_gl(f, a, b, m);
    const double diff = std::abs(cur - prev);
    const double scale = std::max(std::abs(cur), abs_floor);
    res.value = cur;
    res.nodes = m;
    res.est_error = diff;
    if (diff <= rel_tol * scale) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return res;
}

}  // namespace wickfbm
