#include "selftest.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <vector>

#include "hermite.hpp"
#include "kernel.hpp"
#include "montecarlo.hpp"
#include "rng.hpp"
#include "schemes.hpp"
#include "symfun.hpp"
#include "walsh.hpp"

namespace wickfbm {

namespace {

struct Reporter {
  const SelftestLog* log;
  int failures = 0;

  void check(bool ok, const std::string& name) {
    if (!ok) ++failures;
    if (*log) (*log)(std::string(ok ? "[ok]   " : "[FAIL] ") + name);
  }
};

WalshVector random_vector(int n, CounterRng& rng, std::uint64_t stream) {
  WalshVector v(n);
  for (std::size_t m = 0; m < v.size(); ++m) {
    v[static_cast<std::uint32_t>(m)] = 2.0 * rng.uniform01(stream, m) - 1.0;
  }
  return v;
}

double max_abs_diff(const WalshVector& a, const WalshVector& b) {
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    worst = std::max(worst, std::abs(a[static_cast<std::uint32_t>(m)] -
                                     b[static_cast<std::uint32_t>(m)]));
  }
  return worst;
}

void walsh_algebra_suite(Reporter& rep, CounterRng& rng) {
  const int n = 8;
  const WalshVector x = random_vector(n, rng, 11);
  const WalshVector y = random_vector(n, rng, 12);
  const WalshVector z = random_vector(n, rng, 13);

  rep.check(max_abs_diff(wick_product(x, y), wick_product(y, x)) < 1e-12,
            "walsh: wick product commutes");
  rep.check(max_abs_diff(wick_product(wick_product(x, y), z),
                         wick_product(x, wick_product(y, z))) < 1e-11,
            "walsh: wick product associates");
  rep.check(max_abs_diff(wick_product(x + y, z),
                         wick_product(x, z) + wick_product(y, z)) < 1e-12,
            "walsh: wick product is bilinear");
  rep.check(max_abs_diff(wick_product(x, WalshVector::unit(n)), x) == 0.0,
            "walsh: empty-set indicator is the unit");

  // grade additivity on pure grades
  WalshVector g1(n), g2(n);
  g1[0b1u] = 0.7;
  g1[0b100u] = -0.4;
  g2[0b11000u] = 1.3;
  const WalshVector prod = wick_product(g1, g2);
  bool graded = true;
  for (std::size_t m = 0; m < prod.size(); ++m) {
    if (prod[static_cast<std::uint32_t>(m)] != 0.0 && std::popcount(m) != 3) graded = false;
  }
  rep.check(graded, "walsh: grades add on disjoint supports");

  // expectation is multiplicative under the Wick product
  rep.check(std::abs(expectation(wick_product(x, y)) - expectation(x) * expectation(y)) <
                1e-13,
            "walsh: E[X w Y] = E[X] E[Y]");

  // the product is not pointwise: exhibit a witness
  std::vector<int8_t> signs(static_cast<std::size_t>(n), int8_t{1});
  const Path p(n, signs);
  const double pointwise = evaluate(x, p) * evaluate(y, p);
  const double wick = evaluate(wick_product(x, y), p);
  rep.check(std::abs(pointwise - wick) > 1e-6, "walsh: wick product is not pointwise");
}

void kernel_suite(Reporter& rep, const KernelGrid& grid) {
  const int n = grid.steps();
  const double h = grid.hurst().value();
  const double cap = 2.0 * molchan_golosov_constant(grid.hurst()) * std::pow(n, h - 1.0);
  bool bounds = true, monotone = true;
  for (int l = 1; l <= n; ++l) {
    for (int i = 1; i <= l; ++i) {
      if (grid.b(l, i) > cap * (1.0 + 1e-7)) bounds = false;
      if (grid.d(l, i) < -1e-12) monotone = false;
    }
  }
  rep.check(bounds, "kernel: coefficient bound 2 c_H n^{H-1}");
  rep.check(monotone, "kernel: nonnegative increments");

  bool inc_ok = true;
  for (int l = 0; l <= n; ++l) {
    for (int m = 0; m <= l; ++m) {
      double lhs = 0.0;
      for (int i = 1; i <= l; ++i) {
        const double diff = grid.b(l, i) - grid.b(m, i);
        lhs += diff * diff;
      }
      const double rhs = std::pow(static_cast<double>(l - m) / n, 2.0 * h);
      if (lhs > rhs + 1e-10) inc_ok = false;
    }
  }
  rep.check(inc_ok, "kernel: increment Cauchy-Schwarz bound");

  rep.check(std::abs(grid.covariance(1.0, 0.5) - grid.covariance(0.5, 1.0)) == 0.0,
            "kernel: covariance symmetry");
}

void symfun_suite(Reporter& rep, const KernelGrid& grid, CounterRng& rng) {
  const int n = grid.steps();
  bool power_ok = true, inner_ok = true;
  for (int rep_idx = 0; rep_idx < 20; ++rep_idx) {
    const Path p = sample_path(n, 77, static_cast<std::uint64_t>(rep_idx));
    const double t = 0.1 + 0.9 * rng.uniform01(21, static_cast<std::uint64_t>(rep_idx));
    const double s = 0.1 + 0.9 * rng.uniform01(22, static_cast<std::uint64_t>(rep_idx));
    const int k = 1 + static_cast<int>(rng.uniform01(23, static_cast<std::uint64_t>(rep_idx)) * n);
    const WalshVector walk = random_walk_vector(grid, t);
    const double dense = evaluate(wick_power(walk, k), p);
    const double fast = wick_power_path(grid, t, k, p);
    if (std::abs(dense - fast) > 1e-10 * std::max(1.0, std::abs(dense))) power_ok = false;

    const int N = 1 + k % 4;
    const double dense_inner = inner_product(wick_power(random_walk_vector(grid, t), N),
                                             wick_power(random_walk_vector(grid, s), N));
    const double fast_inner = wick_power_inner(grid, t, s, N);
    if (std::abs(dense_inner - fast_inner) > 1e-10 * std::max(1.0, std::abs(dense_inner))) {
      inner_ok = false;
    }
  }
  rep.check(power_ok, "symfun: wick_power_path matches the dense engine");
  rep.check(inner_ok, "symfun: wick_power_inner matches the dense engine");

  bool lemma_ok = true;
  for (int rep_idx = 0; rep_idx < 25; ++rep_idx) {
    const double t = rng.uniform01(31, static_cast<std::uint64_t>(rep_idx));
    const double s = rng.uniform01(32, static_cast<std::uint64_t>(rep_idx));
    for (int N = 1; N <= 10; ++N) {
      const InequalityCheck chk = increment_moment_bound(grid, t, s, N);
      if (chk.lhs > chk.rhs + 1e-12) lemma_ok = false;
    }
  }
  rep.check(lemma_ok, "symfun: increment-moment inequality (8^N lattice gap)");
}

// Walsh coefficients of U^k by direct enumeration of maps C -> {1..l}.
double injective_map_sum(const KernelGrid& grid, int l, std::uint32_t mask) {
  std::vector<int> members;
  for (int i = 1; i <= 32; ++i) {
    if (mask & (std::uint32_t{1} << (i - 1))) members.push_back(i);
  }
  const int k = static_cast<int>(members.size());
  double total = 0.0;
  std::vector<int> target(static_cast<std::size_t>(k), 1);
  for (;;) {
    bool distinct = true;
    for (int a = 0; a < k && distinct; ++a) {
      for (int b = a + 1; b < k; ++b) {
        if (target[static_cast<std::size_t>(a)] == target[static_cast<std::size_t>(b)]) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct) {
      double prod = 1.0;
      for (int a = 0; a < k; ++a) {
        prod *= grid.d(target[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(a)]);
      }
      total += prod;
    }
    int pos = k - 1;
    while (pos >= 0 && target[static_cast<std::size_t>(pos)] == l) {
      target[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++target[static_cast<std::size_t>(pos)];
  }
  return total;
}

void recursion_suite(Reporter& rep, const KernelGrid& small_grid) {
  const int n = small_grid.steps();

  // U^1 reproduces the walk itself
  URecursionState st = URecursionState::initial(small_grid, std::min(3, n));
  u_advance_to(st, n);
  const WalshVector u1 = st.u[1].to_dense();
  const WalshVector walk = random_walk_vector(small_grid, 1.0);
  rep.check(max_abs_diff(u1, walk) < 1e-13, "recursion: U^1 equals the walk");

  // closed form by injective-map enumeration, low orders
  bool closed_ok = true;
  for (int k = 1; k <= std::min(3, n); ++k) {
    const WalshVector uk = st.u[static_cast<std::size_t>(k)].to_dense();
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
      if (std::popcount(mask) != k) continue;
      const double expected = fact * injective_map_sum(small_grid, n, mask);
      if (std::abs(uk[mask] - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
        closed_ok = false;
      }
    }
  }
  rep.check(closed_ok, "recursion: Walsh coefficients match injective-map sums");

  // second order differs from the plain Wick power after two steps
  if (n >= 2) {
    URecursionState st2 = URecursionState::initial(small_grid, 2);
    u_advance_to(st2, 2);
    const WalshVector u2 = st2.u[2].to_dense();
    const WalshVector pw2 = wick_power(random_walk_vector(small_grid, 2.0 / n), 2);
    rep.check(max_abs_diff(u2, pw2) > 1e-12,
              "recursion: U^2 differs from the squared walk after two steps");
  }
}

void hermite_residual_suite(Reporter& rep, const KernelGrid& grid) {
  bool match_ok = true, bound_ok = true;
  for (int N = 1; N <= 4; ++N) {
    for (double t : {0.5, 1.0}) {
      const HermiteResidual res = discrete_hermite_residual(grid, t, N);
      const WalshVector closed = discrete_hermite_residual_closed_form(grid, t, N);
      if (max_abs_diff(res.residual, closed) > 1e-10) match_ok = false;
      if (l2_norm2(res.residual) > res.bound * (1.0 + 1e-9) + 1e-15) bound_ok = false;
    }
  }
  rep.check(match_ok, "hermite recursion: residual matches its closed form");
  rep.check(bound_ok, "hermite recursion: residual norm bound");
}

void scheme_suite(Reporter& rep, const KernelGrid& grid) {
  const int n = grid.steps();

  const ExactSchemeSolution geo = solve_scheme_exact(grid, SchemeSpec::geometric());
  bool unit_mean = true;
  for (const WalshVector& s : geo.first) {
    if (std::abs(expectation(s) - 1.0) > 1e-12) unit_mean = false;
  }
  rep.check(unit_mean, "schemes: geometric solution keeps unit expectation");

  // drift solution equals the volatility-rescaled geometric times the Euler factor
  const double mu = 0.5, sigma = 1.25, s0 = 2.0;
  const SchemeSpec drift = SchemeSpec::drift(mu, sigma, s0);
  const ExactSchemeSolution sd = solve_scheme_exact(grid, drift);
  const double factor = 1.0 + mu / n;
  ExactSchemeSolution v;
  {
    // geometric recursion with volatility sigma/(1+mu/n)
    WalshVector cur = WalshVector::unit(n);
    v.first.push_back(cur);
    for (int l = 1; l <= n; ++l) {
      WalshVector next = wick_product(cur, increment_vector(grid, l));
      next *= sigma / factor;
      next += cur;
      cur = next;
      v.first.push_back(cur);
    }
  }
  bool product_ok = true;
  for (int l = 0; l <= n; ++l) {
    WalshVector w = v.first[static_cast<std::size_t>(l)];
    w *= s0 * std::pow(factor, l);
    if (max_abs_diff(w, sd.first[static_cast<std::size_t>(l)]) >
        1e-12 * std::max(1.0, std::abs(expectation(w)))) {
      product_ok = false;
    }
  }
  rep.check(product_ok, "schemes: drift solution factors through the Euler product");

  // linear system equals its coefficient series over the recursion
  const SchemeSpec lin = SchemeSpec::linear_system(0.4, -0.3, 0.2, 0.5, 1.0, -2.0);
  const ExactSchemeSolution ls = solve_scheme_exact(grid, lin);
  URecursionState st = URecursionState::initial(grid, n);
  const double scale = std::max(std::abs(lin.x0), std::abs(lin.y0));
  const double growth = lin.coefficient_growth();
  auto [alpha, beta] = linear_system_coefficients_normalized(lin, n);
  bool series_ok = true;
  for (int l = 0; l <= n; ++l) {
    if (l > 0) u_step(st);
    WalshVector xs(n), ys(n);
    double weight = 1.0;  // M^k / k!
    for (int k = 0; k <= l; ++k) {
      if (k > 0) weight *= growth / k;
      WalshVector term = st.u[static_cast<std::size_t>(k)].to_dense();
      WalshVector term_y = term;
      term *= scale * alpha[static_cast<std::size_t>(k)] * weight;
      term_y *= scale * beta[static_cast<std::size_t>(k)] * weight;
      xs += term;
      ys += term_y;
    }
    if (max_abs_diff(xs, ls.first[static_cast<std::size_t>(l)]) > 1e-10) series_ok = false;
    if (max_abs_diff(ys, ls.second[static_cast<std::size_t>(l)]) > 1e-10) series_ok = false;
  }
  rep.check(series_ok, "schemes: linear system equals its coefficient series");

  // pathwise product scheme against the Walsh engine with ordinary products
  bool pathwise_ok = true;
  for (std::uint64_t idx = 0; idx < 8; ++idx) {
    const Path p = sample_path(n, 1234, idx);
    const std::vector<double> vals = sottinen_pathwise(grid, p);
    WalshVector cur = WalshVector::unit(n);
    for (int l = 1; l <= n; ++l) {
      WalshVector inc = increment_vector(grid, l);
      inc[0] = 1.0;  // 1 + increment
      cur = pointwise_product(cur, inc);
      if (std::abs(evaluate(cur, p) - vals[static_cast<std::size_t>(l)]) >
          1e-11 * std::max(1.0, std::abs(vals[static_cast<std::size_t>(l)]))) {
        pathwise_ok = false;
      }
    }
  }
  rep.check(pathwise_ok, "schemes: pathwise product matches the Walsh pointwise route");
}

}  // namespace

int run_selftest(const SelftestOptions& opts, const SelftestLog& log) {
  Reporter rep{&log, 0};
  CounterRng rng(opts.seed);
  const HurstParam H(opts.hurst);

  walsh_algebra_suite(rep, rng);

  const KernelGrid grid12 = KernelGrid::build(H, 12, opts.tol);
  kernel_suite(rep, grid12);
  symfun_suite(rep, grid12, rng);
  hermite_residual_suite(rep, grid12);

  const KernelGrid grid6 = KernelGrid::build(H, 6, opts.tol);
  recursion_suite(rep, grid6);

  const KernelGrid grid8 = KernelGrid::build(H, 8, opts.tol);
  scheme_suite(rep, grid8);

  if (log) {
    log(std::string("selftest: ") + std::to_string(rep.failures) + " failure(s)");
  }
  return rep.failures;
}

}  // namespace wickfbm
