#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wickfbm {

/// Hurst parameter restricted to the long-range-dependent range (1/2, 1).
/// The kernel representation below degenerates at H = 1/2, so the boundary
/// is rejected rather than special-cased.
class HurstParam {
 public:
  explicit HurstParam(double h);
  double value() const { return h_; }
  /// H - 1/2, the exponent driving every singularity in the kernel.
  double beta() const { return h_ - 0.5; }
  /// 3/2 - H, the exponent of the s = w^{1/gamma} substitution.
  double gamma() const { return 1.5 - h_; }

 private:
  double h_;
};

/// Normalization constant of the Molchan-Golosov kernel,
/// sqrt(2H Gamma(3/2-H) / (Gamma(H+1/2) Gamma(2-2H))).
double molchan_golosov_constant(HurstParam H);

/// Fractional Brownian motion covariance (|t|^2H + |s|^2H - |t-s|^2H) / 2.
double fbm_covariance(HurstParam H, double t, double s);

/// Molchan-Golosov kernel z_H(t, s) for 0 < s <= 1, 0 <= t <= 1.
/// Evaluates c_H s^{-beta} * int_0^{(t-s)^beta} (s + v^{1/beta})^beta dv,
/// the form obtained from the substitution u = s + v^{1/beta}, which removes
/// the (u-s)^{H-3/2} endpoint singularity; node doubling must stabilize to
/// rel_tol or a QuadratureError is thrown.
double kernel_z(HurstParam H, double t, double s, double rel_tol = 1e-10);

/// Quadrature settings used to build a grid, kept for the cache header.
struct QuadProfile {
  double tol = 1e-9;        // relative tolerance per coefficient
  int outer_base = 16;      // starting outer node count per cell
  int inner_base = 8;       // starting nodes per inner segment
  int outer_max = 2048;     // doubling budget
  int realized_outer = 0;   // largest outer count any cell required
  int realized_inner = 0;   // largest inner count any cell required
};

/// Triangular coefficient grid of the disturbed binary random walk on the
/// lattice {l/n}: b[l][i] = sqrt(n) * int_{(i-1)/n}^{i/n} z(l/n, s) ds for
/// 1 <= i <= l <= n, together with the increments d[l][i] = b[l][i] - b[l-1][i].
///
/// A completed grid is immutable and safe to share across threads.
class KernelGrid {
 public:
  /// Builds the grid with per-coefficient relative tolerance tol.
  /// Construction parallelizes over cells; throws QuadratureError if node
  /// doubling stalls and std::runtime_error if a finished grid violates its
  /// invariants beyond tolerance.
  static KernelGrid build(HurstParam H, int n, double tol = 1e-9);

  static KernelGrid load(const std::string& path);
  void save(const std::string& path) const;

  /// Looks for a cache file keyed by (H, n, tol) under cache_dir, builds and
  /// saves on miss. Empty cache_dir means build without caching.
  static KernelGrid load_or_build(HurstParam H, int n, double tol,
                                  const std::string& cache_dir);

  HurstParam hurst() const { return H_; }
  int steps() const { return n_; }
  double tol() const { return profile_.tol; }
  const QuadProfile& quad_profile() const { return profile_; }

  /// b[l][i]; zero for i > l or l == 0.
  double b(int l, int i) const;
  /// d[l][i] = b[l][i] - b[l-1][i]; d[i][i] = b[i][i]; zero for i > l.
  double d(int l, int i) const;

  /// Lattice index floor(n t), with a snap for t within 1e-9 of a lattice point.
  int lattice_index(double t) const;

  /// E[B_t B_s] of the walk: sum_i b[floor(nt)][i] b[floor(ns)][i].
  double covariance(double t, double s) const;
  /// E[B_{l/n}^2] = sum_i b[l][i]^2.
  double row_norm2(int l) const;

  /// Re-checks the structural invariants (nonnegativity, the 2 c_H n^{H-1}
  /// coefficient bound, row-norm and adjacent-increment bounds); throws
  /// std::runtime_error on violation beyond tolerance.
  void validate() const;

 private:
  KernelGrid(HurstParam H, int n, QuadProfile profile);
  std::size_t offset(int l, int i) const {
    return static_cast<std::size_t>(l - 1) * l / 2 + (i - 1);
  }
  void finalize_increments();

  HurstParam H_;
  int n_;
  QuadProfile profile_;
  std::vector<double> b_;  // triangular, row l stores l entries
  std::vector<double> d_;
};

}  // namespace wickfbm
