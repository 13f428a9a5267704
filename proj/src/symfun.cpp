#include "symfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wickfbm {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

}  // namespace

ESymTable esym(std::span<const double> values, int K) {
  if (K < 0) throw std::invalid_argument("esym: K must be >= 0");
  ESymTable table;
  table.count = values.size();
  table.max_order = K;
  table.e.assign(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> comp(static_cast<std::size_t>(K) + 1, 0.0);  // Neumaier carry
  table.e[0] = 1.0;
  int seen = 0;
  for (double v : values) {
    ++seen;
    const int top = std::min(K, seen);
    for (int k = top; k >= 1; --k) {
      const double x = v * (table.e[k - 1] + comp[k - 1]);
      const double s = table.e[k];
      const double t = s + x;
      comp[k] += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
      table.e[k] = t;
    }
  }
  for (int k = 0; k <= K; ++k) table.e[k] += comp[k];
  return table;
}

double wick_power_path(const KernelGrid& grid, double t, int k, const Path& p) {
  if (k < 0) throw std::invalid_argument("wick_power_path: k must be >= 0");
  if (p.vars() != grid.steps()) {
    throw std::invalid_argument("wick_power_path: path length does not match grid");
  }
  const int l = grid.lattice_index(t);
  if (k > l) return 0.0;
  if (k == 0) return 1.0;
  std::vector<double> v(static_cast<std::size_t>(l));
  for (int i = 1; i <= l; ++i) v[i - 1] = grid.b(l, i) * p.sign(i);
  return factorial(k) * esym(v, k).e[static_cast<std::size_t>(k)];
}

double wick_power_inner(const KernelGrid& grid, double t, double s, int N) {
  if (N < 0) throw std::invalid_argument("wick_power_inner: N must be >= 0");
  const int lt = grid.lattice_index(t);
  const int ls = grid.lattice_index(s);
  const int m = std::min(lt, ls);  // b[ls][i] = 0 beyond floor(ns)
  if (N == 0) return 1.0;
  if (N > m) return 0.0;
  std::vector<double> prod(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) prod[i - 1] = grid.b(lt, i) * grid.b(ls, i);
  const double f = factorial(N);
  // f * e_N first: the grouped form stays in range whenever the result does
  return f * (f * esym(prod, N).e[static_cast<std::size_t>(N)]);
}

double wick_power_diff_norm2(const KernelGrid& grid, double t, double s, int N) {
  const double f = factorial(N);
  return (wick_power_inner(grid, t, t, N) + wick_power_inner(grid, s, s, N) -
          2.0 * wick_power_inner(grid, t, s, N)) /
         f;
}

double wick_series_path(const KernelGrid& grid, double t, const SeriesCoeffs& coeffs,
                        const Path& p) {
  if (p.vars() != grid.steps()) {
    throw std::invalid_argument("wick_series_path: path length does not match grid");
  }
  const int l = grid.lattice_index(t);
  // sum_k a_k e_k(v) = sum_k (a_k / C^k) e_k(C v); the scaled form keeps every
  // factor inside double range even when the raw a_k explode.
  const double growth = coeffs.growth_bound();
  std::vector<double> v(static_cast<std::size_t>(l));
  for (int i = 1; i <= l; ++i) v[i - 1] = growth * grid.b(l, i) * p.sign(i);
  const ESymTable table = esym(v, l);
  double sum = 0.0;
  for (int k = l; k >= 0; --k) {
    sum += coeffs.normalized(k) * table.e[static_cast<std::size_t>(k)];
  }
  return sum;
}

InequalityCheck increment_moment_bound(const KernelGrid& grid, double t, double s, int N) {
  if (N < 1) throw std::invalid_argument("increment_moment_bound: N must be >= 1");
  InequalityCheck chk;
  chk.lhs = wick_power_diff_norm2(grid, t, s, N);
  const double gap = std::abs(static_cast<double>(grid.lattice_index(t)) / grid.steps() -
                              static_cast<double>(grid.lattice_index(s)) / grid.steps());
  chk.rhs = std::pow(8.0, N) * std::pow(gap, 2.0 * grid.hurst().value());
  return chk;
}

MomentDefect covariance_moment_defect(const KernelGrid& grid, double t, double s, int N) {
  if (N < 1) throw std::invalid_argument("covariance_moment_defect: N must be >= 1");
  if (t < s) std::swap(t, s);
  const int ls = grid.lattice_index(s);
  if (ls < N) {
    throw std::invalid_argument("covariance_moment_defect: requires floor(ns) >= N");
  }
  MomentDefect out;
  const double ctt = grid.covariance(t, t);
  const double css = grid.covariance(s, s);
  const double cts = grid.covariance(t, s);
  out.defect = std::pow(ctt, N) + std::pow(css, N) - 2.0 * std::pow(cts, N) -
               wick_power_diff_norm2(grid, t, s, N);
  const double h = grid.hurst().value();
  const double ch = molchan_golosov_constant(grid.hurst());
  out.upper = 2.0 * ch * ch * static_cast<double>(N) * N *
              std::pow(t, 2.0 * h * (N - 1)) * std::pow(grid.steps(), -(2.0 - 2.0 * h));
  return out;
}

InequalityCheck wick_power_norm_bound(const KernelGrid& grid, double t, int N) {
  if (N < 0) throw std::invalid_argument("wick_power_norm_bound: N must be >= 0");
  const double f = factorial(N);
  InequalityCheck chk;
  chk.lhs = wick_power_inner(grid, t, t, N) / (f * f);
  chk.rhs = std::pow(t, 2.0 * grid.hurst().value() * N) / f;
  return chk;
}

}  // namespace wickfbm
