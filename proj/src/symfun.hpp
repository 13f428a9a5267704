#pragma once

#include <span>
#include <vector>

#include "kernel.hpp"
#include "series.hpp"
#include "walsh.hpp"

namespace wickfbm {

/// Elementary symmetric polynomial values e_0..e_K of a value list.
struct ESymTable {
  std::size_t count = 0;  // number of input values
  int max_order = 0;
  std::vector<double> e;  // e[k], k = 0..max_order; e[0] = 1, e[k] = 0 for k > count
};

/// DP recurrence e_k <- e_k + v e_{k-1} per value, O(m K), with per-slot
/// compensated accumulation (signed inputs cancel in the rate studies).
ESymTable esym(std::span<const double> values, int K);

/// Discrete Wick power along one path: k! e_k(b[l][1] s_1, ..., b[l][l] s_l)
/// with l = floor(n t); zero for k > l.
double wick_power_path(const KernelGrid& grid, double t, int k, const Path& p);

/// E[(B_t)^{wick N} (B_s)^{wick N}] = (N!)^2 e_N over the products
/// b[lt][i] b[ls][i], i <= floor(n min(t,s)).
double wick_power_inner(const KernelGrid& grid, double t, double s, int N);

/// Normalized squared distance (1/N!) E[((B_t)^{wick N} - (B_s)^{wick N})^2],
/// assembled from three wick_power_inner calls.
double wick_power_diff_norm2(const KernelGrid& grid, double t, double s, int N);

/// Series value along one path: sum_{k=0}^{floor(nt)} a_k e_k(b[l][i] s_i).
/// (The 1/k! of the functional cancels against the k! of the Wick power.)
double wick_series_path(const KernelGrid& grid, double t, const SeriesCoeffs& coeffs,
                        const Path& p);

/// Inequality check data: lhs <= rhs expected.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// (1/N!) E[((B_t)^{wick N} - (B_s)^{wick N})^2]  vs  8^N |lt/n - ls/n|^{2H}.
InequalityCheck increment_moment_bound(const KernelGrid& grid, double t, double s, int N);

/// Difference defect of the Nth moments:
///   E[B_t^2]^N + E[B_s^2]^N - 2 E[B_t B_s]^N - (1/N!) E[((B_t)^N - (B_s)^N)^2],
/// which lies in [0, 2 c_H^2 N^2 t^{2H(N-1)} n^{-(2-2H)}] for t >= s,
/// floor(ns) >= N.
struct MomentDefect {
  double defect = 0.0;
  double upper = 0.0;
  bool holds(double slack = 1e-11) const {
    return defect >= -slack && defect <= upper + slack;
  }
};
MomentDefect covariance_moment_defect(const KernelGrid& grid, double t, double s, int N);

/// sum_{|C|=N} (b_{t,C})^2 = wick_power_inner(t,t,N)/(N!)^2  vs  t^{2HN}/N!.
InequalityCheck wick_power_norm_bound(const KernelGrid& grid, double t, int N);

}  // namespace wickfbm
