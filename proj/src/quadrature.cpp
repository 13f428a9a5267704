#include "quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace wickfbm {

namespace {

// Newton iteration on the Legendre polynomial P_m; standard Golub-Welsch-free
// construction, good to ~1 ulp for the node counts used here.
GaussLegendreRule make_rule(int m) {
  GaussLegendreRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[m - 1 - i] = x;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

std::map<int, GaussLegendreRule> g_rules;
std::mutex g_rules_mutex;

}  // namespace

const GaussLegendreRule& gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: node count must be >= 1");
  std::lock_guard<std::mutex> lock(g_rules_mutex);
  auto it = g_rules.find(m);
  if (it == g_rules.end()) {
    it = g_rules.emplace(m, make_rule(m)).first;
  }
  return it->second;
}

}  // namespace wickfbm
