#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kernel.hpp"
#include "series.hpp"
#include "walsh.hpp"

namespace wickfbm {

enum class SchemeVariant { geometric, drift, linear_system, sin_cos, pathwise };

const char* to_string(SchemeVariant v);
std::optional<SchemeVariant> scheme_variant_from_string(const std::string& name);

/// Parameters of one Wick difference scheme on the lattice {l/n}:
///   geometric:      S_l = S_{l-1} + S_{l-1} w ΔB_l,                S_0 = 1
///   drift:          S_l = (1+mu/n) S_{l-1} + sigma S_{l-1} w ΔB_l, S_0 = s0
///   linear_system:  X_l = X_{l-1} + (A1 X + A2 Y)_{l-1} w ΔB_l,    X_0 = x0
///                   Y_l = Y_{l-1} + (B1 X + B2 Y)_{l-1} w ΔB_l,    Y_0 = y0
///   sin_cos:        the linear system with (A1,A2,B1,B2,x0,y0) = (0,1,-1,0,0,1)
///   pathwise:       S_l = S_{l-1} (1 + ΔB_l(path)), ordinary product per path
/// where w is the discrete Wick product and ΔB_l the grade-1 increment.
struct SchemeSpec {
  SchemeVariant variant = SchemeVariant::geometric;
  double mu = 0.0, sigma = 1.0, s0 = 1.0;
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0, x0 = 0.0, y0 = 0.0;

  static SchemeSpec geometric();
  static SchemeSpec drift(double mu, double sigma, double s0);
  static SchemeSpec linear_system(double a1, double a2, double b1, double b2,
                                  double x0, double y0);
  static SchemeSpec sin_cos();
  static SchemeSpec pathwise();

  void validate() const;
  bool is_system() const {
    return variant == SchemeVariant::linear_system || variant == SchemeVariant::sin_cos;
  }
  /// 2 max(|A1|,|A2|,|B1|,|B2|), the growth bound of the coefficient recursion.
  double coefficient_growth() const;
};

/// Coefficient series of a scheme solution component, together with the
/// deterministic scale factored out so that |a_k| <= C^k holds.
struct SchemeSeries {
  SeriesCoeffs coeffs;
  double scale = 1.0;
};

/// Series representing the scheme value at lattice step `step` of an n-grid
/// (`second` selects the Y component of a system).
SchemeSeries scheme_discrete_series(const SchemeSpec& spec, int n, int step,
                                    bool second = false);

/// Series of the weak-limit marginal at time t.
SchemeSeries scheme_limit_series(const SchemeSpec& spec, double t, bool second = false);

/// Normalized linear-system coefficient pair (a_k, b_k) / (S M^k) for
/// k = 0..k_max, S = max(|x0|,|y0|), M the coefficient growth bound.
std::pair<std::vector<double>, std::vector<double>> linear_system_coefficients_normalized(
    const SchemeSpec& spec, int k_max);

/// State of the Wick difference recursion
///   U^k_l = U^k_{l-1} + k U^{k-1}_{l-1} w ΔB_l,  U^0 = 1, U^k_0 = 0:
/// one grade-capped sparse vector per order, advanced step by step.
struct URecursionState {
  const KernelGrid* grid = nullptr;
  int max_grade = 8;
  int step = 0;
  std::size_t support_budget = std::size_t{1} << 22;
  std::vector<GradedWalshVector> u;

  static URecursionState initial(const KernelGrid& grid, int max_grade,
                                 std::size_t support_budget = std::size_t{1} << 22);
};

/// Advances one lattice step; throws CapacityError when the support budget is
/// exceeded (never truncates silently).
void u_step(URecursionState& state);
void u_advance_to(URecursionState& state, int step);

struct DifferenceNorm {
  double norm2 = 0.0;  // E | sum_k a_k/k! ((B_t)^{w k} - U^k) |^2, exact
  double bound = 0.0;  // K n^{1-2H} with K from the coefficient certificate at t = 1
};

/// Exact L2 distance between the Wick-power series and the recursion series,
/// computed on the dense engine (CapacityError beyond its range).
DifferenceNorm u_difference_norm(const KernelGrid& grid, const SeriesCoeffs& coeffs,
                                 double t);

struct HermiteResidual {
  WalshVector residual;
  double bound = 0.0;  // 16 c_H^4 N! N^3 n^{-(4-4H)}
};

/// Residual of the discrete Hermite recursion,
///   R = (B_t)^{w(N+1)} - [B_t (B_t)^{w N} - N E[B_t^2] (B_t)^{w(N-1)}],
/// where the middle product is the pointwise one.
HermiteResidual discrete_hermite_residual(const KernelGrid& grid, double t, int N);

/// Same residual by its closed form N! sum_{|C|=N-1} b_C Xi_C sum_{i in C} b_i^2.
WalshVector discrete_hermite_residual_closed_form(const KernelGrid& grid, double t, int N);

/// Full Walsh solution of a scheme, step by step (steps 0..n).
struct ExactSchemeSolution {
  std::vector<WalshVector> first;
  std::vector<WalshVector> second;  // populated for systems only
};
ExactSchemeSolution solve_scheme_exact(const KernelGrid& grid, const SchemeSpec& spec);

/// Ordinary-product scheme along one path: X_l = prod_{j<=l} (1 + ΔB_j(path)).
std::vector<double> sottinen_pathwise(const KernelGrid& grid, const Path& p);

struct SchemePathValue {
  double first = 0.0;
  double second = 0.0;
  bool has_second = false;
};

/// Fast per-path value of the scheme at time t, replacing the recursion
/// series by Wick powers (geometric and drift reduce to plain products via
/// sum_k c^k e_k = prod(1 + c v_i)).
SchemePathValue scheme_series_path(const KernelGrid& grid, const SchemeSpec& spec,
                                   double t, const Path& p);

}  // namespace wickfbm
