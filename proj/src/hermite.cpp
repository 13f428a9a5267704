#include "hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace wickfbm {

double hermite_poly(int N, double sigma2, double x) {
  if (N < 0) throw std::invalid_argument("hermite_poly: N must be >= 0");
  if (sigma2 < 0.0) throw std::invalid_argument("hermite_poly: sigma2 must be >= 0");
  if (N == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < N; ++k) {
    const double next = x * cur - k * sigma2 * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_series_tail_bound(double growth_bound, double sigma2, int K) {
  const double r = growth_bound * growth_bound * sigma2;
  // tail of exp(r) past index K, by forward terms
  double term = 1.0;
  for (int k = 1; k <= K + 1; ++k) term *= r / k;
  double tail = 0.0;
  double t = term;
  for (int k = K + 1; k < K + 2000 && t > 0.0; ++k) {
    tail += t;
    t *= r / (k + 1);
    if (t < tail * 1e-18) {
      tail += t;
      break;
    }
  }
  return std::sqrt(tail);
}

int wick_series_truncation(double growth_bound, double sigma2, double tail_tol) {
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("wick_series_truncation: tail_tol must be > 0");
  }
  for (int K = 0; K <= 10000; ++K) {
    if (wick_series_tail_bound(growth_bound, sigma2, K) < tail_tol) return K;
  }
  throw std::runtime_error("wick_series_truncation: tail tolerance unreachable");
}

double gaussian_wick_functional(const SeriesCoeffs& coeffs, double sigma2, double x, int K) {
  if (K < 0) throw std::invalid_argument("gaussian_wick_functional: K must be >= 0");
  double sum = coeffs.normalized(0);
  if (K == 0) return sum;
  // accumulate a_k/k! h^k as normalized(k) * (C^k/k!) * h^k
  const double growth = coeffs.growth_bound();
  double h_prev = 1.0;  // h^0
  double h_cur = x;     // h^1
  double weight = 1.0;  // C^k / k!
  for (int k = 1; k <= K; ++k) {
    weight *= growth / k;
    sum += coeffs.normalized(k) * weight * h_cur;
    const double h_next = x * h_cur - k * sigma2 * h_prev;
    h_prev = h_cur;
    h_cur = h_next;
  }
  return sum;
}

std::vector<double> limit_marginal_samples(const SeriesCoeffs& coeffs, HurstParam H,
                                           double t, std::size_t count,
                                           std::uint64_t seed, double scale,
                                           std::uint64_t stream, double tail_tol,
                                           int* truncation_out, double* tail_bound_out) {
  if (!(t > 0.0) || t > 1.0) {
    throw std::invalid_argument("limit_marginal_samples: t must lie in (0, 1]");
  }
  const double sigma2 = std::pow(t, 2.0 * H.value());
  const int K = wick_series_truncation(coeffs.growth_bound(), sigma2, tail_tol);
  if (truncation_out != nullptr) *truncation_out = K;
  if (tail_bound_out != nullptr) {
    *tail_bound_out = wick_series_tail_bound(coeffs.growth_bound(), sigma2, K);
  }
  const double sigma = std::sqrt(sigma2);
  CounterRng rng(seed);
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = sigma * rng.normal(stream, j);
    out[j] = scale * gaussian_wick_functional(coeffs, sigma2, x, K);
  }
  return out;
}

}  // namespace wickfbm
