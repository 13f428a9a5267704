#include "schemes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "symfun.hpp"

namespace wickfbm {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

SeriesCoeffs constant_one_series(const std::string& label) {
  return SeriesCoeffs([](int) { return 1.0; }, [](int) { return 1.0; }, 1.0, label);
}

SeriesCoeffs geometric_series(double c, const std::string& label) {
  return SeriesCoeffs([c](int k) { return std::pow(c, k); }, [](int) { return 1.0; },
                      c, label);
}

SeriesCoeffs sine_series() {
  auto a = [](int k) -> double {
    switch (k % 4) {
      case 1: return 1.0;
      case 3: return -1.0;
      default: return 0.0;
    }
  };
  return SeriesCoeffs(a, a, 1.0, "wick-sine");
}

SeriesCoeffs cosine_series() {
  auto a = [](int k) -> double {
    switch (k % 4) {
      case 0: return 1.0;
      case 2: return -1.0;
      default: return 0.0;
    }
  };
  return SeriesCoeffs(a, a, 1.0, "wick-cosine");
}

SchemeSpec as_linear(const SchemeSpec& spec) {
  if (spec.variant == SchemeVariant::sin_cos) {
    SchemeSpec lin = SchemeSpec::linear_system(0.0, 1.0, -1.0, 0.0, 0.0, 1.0);
    return lin;
  }
  return spec;
}

SchemeSeries linear_series(const SchemeSpec& spec, int k_max, bool second,
                           const std::string& label) {
  const SchemeSpec lin = as_linear(spec);
  const double scale = std::max(std::abs(lin.x0), std::abs(lin.y0));
  const double growth = lin.coefficient_growth();
  if (scale == 0.0) {
    return SchemeSeries{SeriesCoeffs([](int) { return 0.0; }, [](int) { return 0.0; },
                                     std::max(growth, 1.0), label),
                        0.0};
  }
  auto [alpha, beta] = linear_system_coefficients_normalized(lin, k_max);
  auto seq = std::make_shared<std::vector<double>>(second ? std::move(beta)
                                                          : std::move(alpha));
  auto normalized = [seq](int k) -> double {
    if (k >= static_cast<int>(seq->size())) {
      throw std::out_of_range("linear-system series: order beyond precomputed range");
    }
    return (*seq)[static_cast<std::size_t>(k)];
  };
  auto raw = [seq, growth](int k) -> double {
    if (k >= static_cast<int>(seq->size())) {
      throw std::out_of_range("linear-system series: order beyond precomputed range");
    }
    return (*seq)[static_cast<std::size_t>(k)] * std::pow(growth, k);
  };
  return SchemeSeries{SeriesCoeffs(raw, normalized, growth, label), scale};
}

}  // namespace

const char* to_string(SchemeVariant v) {
  switch (v) {
    case SchemeVariant::geometric: return "geometric";
    case SchemeVariant::drift: return "drift";
    case SchemeVariant::linear_system: return "linear_system";
    case SchemeVariant::sin_cos: return "sin_cos";
    case SchemeVariant::pathwise: return "pathwise_sottinen";
  }
  return "unknown";
}

std::optional<SchemeVariant> scheme_variant_from_string(const std::string& name) {
  if (name == "geometric") return SchemeVariant::geometric;
  if (name == "drift") return SchemeVariant::drift;
  if (name == "linear_system") return SchemeVariant::linear_system;
  if (name == "sin_cos") return SchemeVariant::sin_cos;
  if (name == "pathwise_sottinen" || name == "pathwise") return SchemeVariant::pathwise;
  return std::nullopt;
}

SchemeSpec SchemeSpec::geometric() {
  SchemeSpec s;
  s.variant = SchemeVariant::geometric;
  return s;
}

SchemeSpec SchemeSpec::drift(double mu, double sigma, double s0) {
  SchemeSpec s;
  s.variant = SchemeVariant::drift;
  s.mu = mu;
  s.sigma = sigma;
  s.s0 = s0;
  s.validate();
  return s;
}

SchemeSpec SchemeSpec::linear_system(double a1, double a2, double b1, double b2,
                                     double x0, double y0) {
  SchemeSpec s;
  s.variant = SchemeVariant::linear_system;
  s.a1 = a1;
  s.a2 = a2;
  s.b1 = b1;
  s.b2 = b2;
  s.x0 = x0;
  s.y0 = y0;
  s.validate();
  return s;
}

SchemeSpec SchemeSpec::sin_cos() {
  SchemeSpec s;
  s.variant = SchemeVariant::sin_cos;
  return s;
}

SchemeSpec SchemeSpec::pathwise() {
  SchemeSpec s;
  s.variant = SchemeVariant::pathwise;
  return s;
}

void SchemeSpec::validate() const {
  if (variant == SchemeVariant::drift && !(sigma > 0.0)) {
    throw std::invalid_argument("SchemeSpec: drift scheme requires sigma > 0");
  }
  if (variant == SchemeVariant::linear_system) {
    // coefficient recursion growth certificate, checked on a prefix
    const double scale = std::max(std::abs(x0), std::abs(y0));
    if (scale > 0.0) {
      auto [alpha, beta] = linear_system_coefficients_normalized(*this, 50);
      for (int k = 0; k <= 50; ++k) {
        if (std::abs(alpha[static_cast<std::size_t>(k)]) > 1.0 + 1e-12 ||
            std::abs(beta[static_cast<std::size_t>(k)]) > 1.0 + 1e-12) {
          throw std::logic_error("SchemeSpec: coefficient growth bound violated");
        }
      }
    }
  }
}

double SchemeSpec::coefficient_growth() const {
  switch (variant) {
    case SchemeVariant::geometric: return 1.0;
    case SchemeVariant::drift: return std::max(sigma, 1e-300);
    case SchemeVariant::sin_cos: return 1.0;
    case SchemeVariant::linear_system:
      return 2.0 * std::max(std::max(std::abs(a1), std::abs(a2)),
                            std::max(std::abs(b1), std::abs(b2)));
    case SchemeVariant::pathwise: return 1.0;
  }
  return 1.0;
}

std::pair<std::vector<double>, std::vector<double>> linear_system_coefficients_normalized(
    const SchemeSpec& spec, int k_max) {
  const SchemeSpec lin = as_linear(spec);
  if (lin.variant != SchemeVariant::linear_system) {
    throw std::invalid_argument("linear_system_coefficients: not a system scheme");
  }
  const double scale = std::max(std::abs(lin.x0), std::abs(lin.y0));
  std::vector<double> alpha(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> beta(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (scale == 0.0) return {alpha, beta};
  const double growth = lin.coefficient_growth();
  if (!(growth > 0.0)) {
    // all four matrix entries are zero: the series terminates at k = 0
    alpha[0] = lin.x0 / scale;
    beta[0] = lin.y0 / scale;
    return {alpha, beta};
  }
  alpha[0] = lin.x0 / scale;
  beta[0] = lin.y0 / scale;
  for (int k = 1; k <= k_max; ++k) {
    alpha[static_cast<std::size_t>(k)] =
        (lin.a1 * alpha[static_cast<std::size_t>(k - 1)] +
         lin.a2 * beta[static_cast<std::size_t>(k - 1)]) /
        growth;
    beta[static_cast<std::size_t>(k)] =
        (lin.b1 * alpha[static_cast<std::size_t>(k - 1)] +
         lin.b2 * beta[static_cast<std::size_t>(k - 1)]) /
        growth;
  }
  return {alpha, beta};
}

SchemeSeries scheme_discrete_series(const SchemeSpec& spec, int n, int step, bool second) {
  if (n < 1) throw std::invalid_argument("scheme_discrete_series: n must be >= 1");
  if (step < 0 || step > n) {
    throw std::invalid_argument("scheme_discrete_series: step out of range");
  }
  switch (spec.variant) {
    case SchemeVariant::geometric:
      return {constant_one_series("geometric"), 1.0};
    case SchemeVariant::drift: {
      const double growth_factor = 1.0 + spec.mu / n;
      if (!(growth_factor > 0.0)) {
        throw std::invalid_argument("scheme_discrete_series: drift requires 1 + mu/n > 0");
      }
      const double c = spec.sigma / growth_factor;
      return {geometric_series(c, "drift"), spec.s0 * std::pow(growth_factor, step)};
    }
    case SchemeVariant::sin_cos:
      return {second ? cosine_series() : sine_series(), 1.0};
    case SchemeVariant::linear_system:
      return linear_series(spec, std::max(n, 64), second, "linear-system");
    case SchemeVariant::pathwise:
      throw std::invalid_argument("scheme_discrete_series: pathwise scheme has no series");
  }
  throw std::logic_error("scheme_discrete_series: unhandled variant");
}

SchemeSeries scheme_limit_series(const SchemeSpec& spec, double t, bool second) {
  switch (spec.variant) {
    case SchemeVariant::geometric:
      return {constant_one_series("geometric"), 1.0};
    case SchemeVariant::drift:
      return {geometric_series(spec.sigma, "drift"), spec.s0 * std::exp(spec.mu * t)};
    case SchemeVariant::sin_cos:
      return {second ? cosine_series() : sine_series(), 1.0};
    case SchemeVariant::linear_system:
      return linear_series(spec, 4096, second, "linear-system");
    case SchemeVariant::pathwise:
      // the pathwise scheme converges to the ordinary exponential; its
      // marginal is not a Wick analytic functional of the limit
      throw std::invalid_argument("scheme_limit_series: pathwise scheme has no series");
  }
  throw std::logic_error("scheme_limit_series: unhandled variant");
}

URecursionState URecursionState::initial(const KernelGrid& grid, int max_grade,
                                         std::size_t support_budget) {
  if (max_grade < 0 || max_grade > grid.steps()) {
    throw std::invalid_argument("URecursionState: max_grade must lie in [0, n]");
  }
  URecursionState st;
  st.grid = &grid;
  st.max_grade = max_grade;
  st.step = 0;
  st.support_budget = support_budget;
  st.u.reserve(static_cast<std::size_t>(max_grade) + 1);
  for (int k = 0; k <= max_grade; ++k) {
    if (k == 0) {
      st.u.push_back(GradedWalshVector::unit(grid.steps(), 0));
    } else {
      st.u.emplace_back(grid.steps(), k);
    }
  }
  return st;
}

void u_step(URecursionState& state) {
  if (state.grid == nullptr) throw std::invalid_argument("u_step: uninitialized state");
  const KernelGrid& grid = *state.grid;
  const int l = state.step + 1;
  if (l > grid.steps()) throw std::invalid_argument("u_step: already at the final step");
  std::vector<double> weights(static_cast<std::size_t>(grid.steps()), 0.0);
  for (int i = 1; i <= l; ++i) weights[static_cast<std::size_t>(i - 1)] = grid.d(l, i);
  // downward so every update reads the previous step's U^{k-1}
  for (int k = state.max_grade; k >= 1; --k) {
    GradedWalshVector bump =
        state.u[static_cast<std::size_t>(k - 1)].wick_product_grade1(weights,
                                                                     state.support_budget);
    state.u[static_cast<std::size_t>(k)].axpy(static_cast<double>(k), bump);
    if (state.u[static_cast<std::size_t>(k)].support_size() > state.support_budget) {
      throw CapacityError("u_step: recursion support exceeds the configured budget");
    }
  }
  state.step = l;
}

void u_advance_to(URecursionState& state, int step) {
  if (step < state.step) throw std::invalid_argument("u_advance_to: cannot step backwards");
  while (state.step < step) u_step(state);
}

DifferenceNorm u_difference_norm(const KernelGrid& grid, const SeriesCoeffs& coeffs,
                                 double t) {
  const int n = grid.steps();
  if (n > kDenseWalshMaxVars) {
    throw CapacityError("u_difference_norm: grid too large for the dense engine");
  }
  const int l = grid.lattice_index(t);
  const double growth = coeffs.growth_bound();

  // Wick-power side: sum_k a_k/k! (B_t)^{w k}; powers vanish beyond grade l.
  WalshVector series_side(n);
  const WalshVector walk = random_walk_vector(grid, t);
  WalshVector power = WalshVector::unit(n);
  double weight = 1.0;  // C^k / k!
  for (int k = 0; k <= l; ++k) {
    if (k > 0) {
      power = wick_product(power, walk);
      weight *= growth / k;
    }
    WalshVector term = power;
    term *= coeffs.normalized(k) * weight;
    series_side += term;
  }

  // Recursion side: sum_k a_k/k! U^k_l.
  URecursionState st = URecursionState::initial(grid, l);
  u_advance_to(st, l);
  WalshVector recursion_side(n);
  weight = 1.0;
  for (int k = 0; k <= l; ++k) {
    if (k > 0) weight *= growth / k;
    WalshVector term = st.u[static_cast<std::size_t>(k)].to_dense();
    term *= coeffs.normalized(k) * weight;
    recursion_side += term;
  }

  DifferenceNorm out;
  out.norm2 = l2_norm2(series_side - recursion_side);
  // certificate constant at t = 1: sum_{k>=2} C^{2k} (k-1)^3 / (k-1)!
  double constant = 0.0;
  double add = std::pow(growth, 4.0);  // k = 2 term
  for (int k = 2; k <= 2000; ++k) {
    constant += add;
    if (add < constant * 1e-16) break;
    const double j = static_cast<double>(k - 1);
    add *= growth * growth * std::pow((j + 1.0) / j, 3) / (j + 1.0);
  }
  out.bound = constant * std::pow(static_cast<double>(n), 1.0 - 2.0 * grid.hurst().value());
  return out;
}

HermiteResidual discrete_hermite_residual(const KernelGrid& grid, double t, int N) {
  if (N < 1) throw std::invalid_argument("discrete_hermite_residual: N must be >= 1");
  const int n = grid.steps();
  if (n > kDenseWalshMaxVars) {
    throw CapacityError("discrete_hermite_residual: grid too large for the dense engine");
  }
  const WalshVector walk = random_walk_vector(grid, t);
  const WalshVector pow_nm1 = wick_power(walk, N - 1);
  const WalshVector pow_n = wick_product(pow_nm1, walk);
  const WalshVector pow_np1 = wick_product(pow_n, walk);
  const double sigma2 = inner_product(walk, walk);

  WalshVector bracket = pointwise_product(walk, pow_n);
  WalshVector correction = pow_nm1;
  correction *= static_cast<double>(N) * sigma2;
  bracket -= correction;

  HermiteResidual out{pow_np1 - bracket, 0.0};
  const double ch = molchan_golosov_constant(grid.hurst());
  const double h = grid.hurst().value();
  out.bound = 16.0 * std::pow(ch, 4) * factorial(N) * std::pow(static_cast<double>(N), 3) *
              std::pow(static_cast<double>(n), -(4.0 - 4.0 * h));
  return out;
}

WalshVector discrete_hermite_residual_closed_form(const KernelGrid& grid, double t, int N) {
  if (N < 1) throw std::invalid_argument("closed-form residual: N must be >= 1");
  const int n = grid.steps();
  if (n > kDenseWalshMaxVars) {
    throw CapacityError("closed-form residual: grid too large for the dense engine");
  }
  const int l = grid.lattice_index(t);
  WalshVector out(n);
  const double fact = factorial(N);
  const std::uint32_t top = static_cast<std::uint32_t>(std::size_t{1} << l);
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    if (std::popcount(mask) != N - 1) continue;
    double b_c = 1.0;
    double sum_sq = 0.0;
    for (int i = 1; i <= l; ++i) {
      if (mask & (std::uint32_t{1} << (i - 1))) {
        const double bi = grid.b(l, i);
        b_c *= bi;
        sum_sq += bi * bi;
      }
    }
    out[mask] = fact * b_c * sum_sq;
  }
  return out;
}

ExactSchemeSolution solve_scheme_exact(const KernelGrid& grid, const SchemeSpec& spec) {
  const int n = grid.steps();
  if (n > kDenseWalshMaxVars) {
    throw CapacityError("solve_scheme_exact: grid too large for the dense engine");
  }
  if (spec.variant == SchemeVariant::pathwise) {
    throw std::invalid_argument(
        "solve_scheme_exact: the pathwise scheme is evaluated per path, not as a "
        "Walsh vector");
  }
  spec.validate();
  ExactSchemeSolution sol;
  sol.first.reserve(static_cast<std::size_t>(n) + 1);

  std::vector<double> weights(static_cast<std::size_t>(n), 0.0);
  auto load_row = [&](int l) {
    for (int i = 1; i <= n; ++i) {
      weights[static_cast<std::size_t>(i - 1)] = i <= l ? grid.d(l, i) : 0.0;
    }
  };

  if (!spec.is_system()) {
    WalshVector s = WalshVector::unit(n);
    if (spec.variant == SchemeVariant::drift) s *= spec.s0;
    sol.first.push_back(s);
    for (int l = 1; l <= n; ++l) {
      load_row(l);
      WalshVector next = wick_product_grade1(sol.first.back(), weights);
      if (spec.variant == SchemeVariant::geometric) {
        next += sol.first.back();
      } else {
        next *= spec.sigma;
        WalshVector held = sol.first.back();
        held *= 1.0 + spec.mu / n;
        next += held;
      }
      sol.first.push_back(std::move(next));
    }
    return sol;
  }

  const SchemeSpec lin = as_linear(spec);
  sol.second.reserve(static_cast<std::size_t>(n) + 1);
  WalshVector x = WalshVector::unit(n);
  x *= lin.x0;
  WalshVector y = WalshVector::unit(n);
  y *= lin.y0;
  sol.first.push_back(x);
  sol.second.push_back(y);
  for (int l = 1; l <= n; ++l) {
    load_row(l);
    const WalshVector& xp = sol.first.back();
    const WalshVector& yp = sol.second.back();
    WalshVector drive_x = lin.a1 * xp;
    drive_x += lin.a2 * yp;
    WalshVector drive_y = lin.b1 * xp;
    drive_y += lin.b2 * yp;
    WalshVector xn = xp + wick_product_grade1(drive_x, weights);
    WalshVector yn = yp + wick_product_grade1(drive_y, weights);
    sol.first.push_back(std::move(xn));
    sol.second.push_back(std::move(yn));
  }
  return sol;
}

std::vector<double> sottinen_pathwise(const KernelGrid& grid, const Path& p) {
  const int n = grid.steps();
  if (p.vars() != n) {
    throw std::invalid_argument("sottinen_pathwise: path length does not match grid");
  }
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  out[0] = 1.0;
  double cur = 1.0;
  for (int l = 1; l <= n; ++l) {
    double delta = 0.0;
    for (int i = 1; i <= l; ++i) delta += grid.d(l, i) * p.sign(i);
    cur *= 1.0 + delta;
    out[static_cast<std::size_t>(l)] = cur;
  }
  return out;
}

SchemePathValue scheme_series_path(const KernelGrid& grid, const SchemeSpec& spec,
                                   double t, const Path& p) {
  const int l = grid.lattice_index(t);
  SchemePathValue out;
  switch (spec.variant) {
    case SchemeVariant::geometric: {
      double prod = 1.0;
      for (int i = 1; i <= l; ++i) prod *= 1.0 + grid.b(l, i) * p.sign(i);
      out.first = prod;
      return out;
    }
    case SchemeVariant::drift: {
      const SchemeSeries series = scheme_discrete_series(spec, grid.steps(), l);
      const double c = series.coeffs.growth_bound();
      double prod = 1.0;
      for (int i = 1; i <= l; ++i) prod *= 1.0 + c * grid.b(l, i) * p.sign(i);
      out.first = series.scale * prod;
      return out;
    }
    case SchemeVariant::sin_cos:
    case SchemeVariant::linear_system: {
      // sum_k e_k(v) M^k (x0, y0) = prod_j (I + v_j M) (x0, y0): the factors
      // are polynomials in the one coefficient matrix M, so they commute and
      // the scalar Vieta identity lifts verbatim.
      const SchemeSpec lin = as_linear(spec);
      double x = lin.x0;
      double y = lin.y0;
      for (int i = 1; i <= l; ++i) {
        const double v = grid.b(l, i) * p.sign(i);
        const double xn = x + v * (lin.a1 * x + lin.a2 * y);
        const double yn = y + v * (lin.b1 * x + lin.b2 * y);
        x = xn;
        y = yn;
      }
      out.first = x;
      out.second = y;
      out.has_second = true;
      return out;
    }
    case SchemeVariant::pathwise: {
      out.first = sottinen_pathwise(grid, p)[static_cast<std::size_t>(l)];
      return out;
    }
  }
  throw std::logic_error("scheme_series_path: unhandled variant");
}

}  // namespace wickfbm
