#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "hermite.hpp"

#include <cmath>

#include "doctest.h"
#include "montecarlo.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace wickfbm;

TEST_CASE("low-degree closed forms") {
  for (double sigma2 : {0.25, 1.0, 2.5}) {
    for (double x : {-1.3, 0.0, 0.4, 2.0}) {
      CHECK(hermite_poly(0, sigma2, x) == 1.0);
      CHECK(hermite_poly(1, sigma2, x) == x);
      CHECK(hermite_poly(2, sigma2, x) == doctest::Approx(x * x - sigma2).epsilon(1e-15));
      CHECK(hermite_poly(3, sigma2, x) ==
            doctest::Approx(x * x * x - 3.0 * sigma2 * x).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(hermite_poly(-1, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hermite_poly(2, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("three-term recursion holds as evaluated") {
  CounterRng rng(3);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const double sigma2 = 2.0 * rng.uniform01(0, trial);
    const double x = 6.0 * rng.uniform01(1, trial) - 3.0;
    for (int N = 1; N <= 30; ++N) {
      const double lhs = hermite_poly(N + 1, sigma2, x);
      const double rhs =
          x * hermite_poly(N, sigma2, x) - N * sigma2 * hermite_poly(N - 1, sigma2, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthogonality under the gaussian weight") {
  // int h_j h_k dN(0, sigma^2) = delta_{jk} j! sigma^{2j}, checked by
  // Gauss-Hermite quadrature exact on the polynomial degrees involved
  const double sigma2 = 0.8;
  const double sigma = std::sqrt(sigma2);
  const oracle::GaussHermiteRule rule = oracle::gauss_hermite(16);
  auto norm2 = [&](int j) {
    double out = std::pow(sigma2, j);
    for (int m = 2; m <= j; ++m) out *= m;
    return out;
  };
  for (int j = 0; j <= 12; ++j) {
    for (int k = j; k <= 12; ++k) {
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = std::sqrt(2.0) * sigma * rule.nodes[q];
        acc += rule.weights[q] * hermite_poly(j, sigma2, x) * hermite_poly(k, sigma2, x);
      }
      acc /= std::sqrt(M_PI);
      const double scale = std::sqrt(norm2(j) * norm2(k));
      if (j == k) {
        CHECK(acc == doctest::Approx(norm2(j)).epsilon(1e-10));
      } else {
        CHECK(std::abs(acc) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("wick exponential series converges to its closed form") {
  const SeriesCoeffs ones([](int) { return 1.0; }, 1.0, "exp");
  for (double sigma2 : {0.3, 1.0}) {
    for (double x : {-0.9, 0.0, 1.7}) {
      const int K = wick_series_truncation(1.0, sigma2, 1e-10);
      const double got = gaussian_wick_functional(ones, sigma2, x, K);
      CHECK(got == doctest::Approx(std::exp(x - 0.5 * sigma2)).epsilon(1e-8));
    }
  }
}

TEST_CASE("identity coefficients return the point itself") {
  const SeriesCoeffs identity([](int k) { return k == 1 ? 1.0 : 0.0; }, 1.0, "id");
  for (int K : {1, 5, 40}) {
    CHECK(gaussian_wick_functional(identity, 0.7, 1.234, K) ==
          doctest::Approx(1.234).epsilon(1e-14));
  }
}

TEST_CASE("functional agrees with an independently ordered summation") {
  const SeriesCoeffs coeffs(
      [](int k) {
        switch (k % 4) {
          case 1: return 1.0;
          case 3: return -1.0;
          default: return 0.0;
        }
      },
      1.0, "sine");
  const double sigma2 = 0.9;
  const int K = 40;
  CounterRng rng(4);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const double x = 5.0 * rng.uniform01(0, trial) - 2.5;
    // reverse-order long double summation with independently evaluated terms
    long double acc = 0.0L;
    long double fact = 1.0L;
    std::vector<long double> terms;
    for (int k = 0; k <= K; ++k) {
      if (k > 0) fact *= k;
      terms.push_back(static_cast<long double>(coeffs(k)) / fact *
                      static_cast<long double>(hermite_poly(k, sigma2, x)));
    }
    for (int k = K; k >= 0; --k) acc += terms[static_cast<std::size_t>(k)];
    const double got = gaussian_wick_functional(coeffs, sigma2, x, K);
    CHECK(got == doctest::Approx(static_cast<double>(acc)).epsilon(1e-10));
  }
}

TEST_CASE("truncation chooser meets its tail bound") {
  const int K = wick_series_truncation(1.0, 1.0, 1e-8);
  CHECK(wick_series_tail_bound(1.0, 1.0, K) < 1e-8);
  CHECK(wick_series_tail_bound(1.0, 1.0, K - 1) >= 1e-8);
  CHECK_THROWS_AS(wick_series_truncation(1.0, 1.0, 0.0), std::invalid_argument);
  // a certificate this large cannot reach the tolerance within the order cap
  CHECK_THROWS_AS(wick_series_truncation(1e3, 1.0, 1e-12), std::runtime_error);
}

TEST_CASE("limit marginal sampler hits the lognormal moments") {
  const SeriesCoeffs ones([](int) { return 1.0; }, 1.0, "exp");
  const std::size_t count = 200000;
  const std::vector<double> samples =
      limit_marginal_samples(ones, HurstParam(0.75), 1.0, count, 7);
  const MomentReport rep = moment_report(samples);
  CHECK(std::abs(rep.mean - 1.0) <= 4.0 * rep.std_error);
  const double var_se = variance_std_error(samples);
  CHECK(std::abs(rep.variance - (std::exp(1.0) - 1.0)) <= 4.0 * var_se);
}

TEST_CASE("identity coefficients sample a centered gaussian") {
  const SeriesCoeffs identity([](int k) { return k == 1 ? 1.0 : 0.0; }, 1.0, "id");
  const HurstParam H(0.7);
  const double t = 0.6;
  const std::vector<double> samples = limit_marginal_samples(identity, H, t, 100000, 11);
  const MomentReport rep = moment_report(samples);
  CHECK(std::abs(rep.mean) <= 4.0 * rep.std_error);
  const double target = std::pow(t, 2.0 * 0.7);
  CHECK(std::abs(rep.variance - target) <= 4.0 * variance_std_error(samples));
}

TEST_CASE("sampler is a pure function of seed and index") {
  const SeriesCoeffs ones([](int) { return 1.0; }, 1.0, "exp");
  const auto a = limit_marginal_samples(ones, HurstParam(0.75), 1.0, 512, 99);
  const auto b = limit_marginal_samples(ones, HurstParam(0.75), 1.0, 512, 99);
  const auto c = limit_marginal_samples(ones, HurstParam(0.75), 1.0, 512, 100);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("sampler reports its truncation order and tail bound") {
  const SeriesCoeffs ones([](int) { return 1.0; }, 1.0, "exp");
  int K = -1;
  double tail = 1.0;
  limit_marginal_samples(ones, HurstParam(0.75), 1.0, 8, 5, 1.0, 0, 1e-10, &K, &tail);
  CHECK(K > 0);
  CHECK(tail < 1e-10);
  CHECK(K == wick_series_truncation(1.0, 1.0, 1e-10));
}

TEST_CASE("monte carlo mean of the functional is the constant coefficient") {
  const SeriesCoeffs coeffs([](int k) { return k <= 3 ? 0.5 : 0.0; }, 1.0, "cubic");
  const double sigma2 = 0.64;
  const double sigma = std::sqrt(sigma2);
  const int K = 8;
  CounterRng rng(21);
  const std::size_t count = 200000;
  std::vector<double> values(count);
  for (std::size_t j = 0; j < count; ++j) {
    values[j] = gaussian_wick_functional(coeffs, sigma2, sigma * rng.normal(0, j), K);
  }
  const MomentReport rep = moment_report(values);
  CHECK(std::abs(rep.mean - 0.5) <= 4.0 * rep.std_error);
}
