#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kernel.hpp"

namespace wickfbm {

/// Raised when an operation would exceed the configured engine size
/// (dense vectors above kDenseWalshMaxVars, graded supports above budget).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Hard cap for the dense engine: 2^n coefficients are materialized.
constexpr int kDenseWalshMaxVars = 24;

/// One realization of the sign variables xi_1..xi_n, each entry +-1.
class Path {
 public:
  Path(int n, std::vector<int8_t> signs);
  int vars() const { return n_; }
  int sign(int i) const { return signs_[static_cast<std::size_t>(i - 1)]; }  // i in 1..n
  const std::vector<int8_t>& signs() const { return signs_; }

 private:
  int n_;
  std::vector<int8_t> signs_;
};

/// Dense Walsh decomposition of a function of (xi_1..xi_n):
/// coeffs[mask] multiplies Xi_A = prod_{i in A} xi_i, with bit i-1 <=> index i.
/// Value semantics; operations return new vectors and never mutate inputs.
class WalshVector {
 public:
  explicit WalshVector(int n);
  static WalshVector unit(int n);                       // indicator of the empty set
  static WalshVector basis(int n, std::uint32_t mask);  // Xi_A

  int vars() const { return n_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::uint32_t mask) const { return coeffs_[mask]; }
  double& operator[](std::uint32_t mask) { return coeffs_[mask]; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  WalshVector& operator+=(const WalshVector& other);
  WalshVector& operator-=(const WalshVector& other);
  WalshVector& operator*=(double scalar);

  /// "mask<TAB>coefficient" lines sorted by mask; the golden-test dump format.
  void dump(std::ostream& os) const;

 private:
  int n_;
  std::vector<double> coeffs_;
};

WalshVector operator+(WalshVector a, const WalshVector& b);
WalshVector operator-(WalshVector a, const WalshVector& b);
WalshVector operator*(double s, WalshVector a);

/// Discrete Wick product: result[C] = sum over disjoint splits A u B = C of
/// x_A y_B, by submask enumeration (O(3^n) total).
WalshVector wick_product(const WalshVector& x, const WalshVector& y);

/// Wick product with a grade-1 vector given per index (weights[i-1]
/// multiplies xi_i): result[C] = sum_{i in C} x[C \ {i}] weights[i-1],
/// O(2^n n) instead of O(3^n).
WalshVector wick_product_grade1(const WalshVector& x, std::span<const double> weights);

/// k-fold Wick product; k = 0 yields the unit.
WalshVector wick_power(const WalshVector& x, int k);

/// Pointwise product: Xi_A Xi_B = Xi_{A xor B}, so result[A^B] += x_A y_B.
WalshVector pointwise_product(const WalshVector& x, const WalshVector& y);

double inner_product(const WalshVector& x, const WalshVector& y);
double expectation(const WalshVector& x);
double l2_norm2(const WalshVector& x);

/// Pathwise evaluation sum_A x_A prod_{i in A} signs[i].
double evaluate(const WalshVector& x, const Path& p);

/// Grade-1 vector of the walk at time t: coeffs[{i}] = b[floor(nt)][i].
/// Requires grid.steps() <= kDenseWalshMaxVars.
WalshVector random_walk_vector(const KernelGrid& grid, double t);

/// Grade-1 vector of the increment over step l: coeffs[{i}] = d[l][i].
WalshVector increment_vector(const KernelGrid& grid, int l);

/// Sparse grade-bucketed Walsh expansion: per grade, (mask, coefficient)
/// pairs sorted by mask, every mask with popcount equal to its bucket.
/// Carrier for recursions whose iterates have small fixed-grade support.
class GradedWalshVector {
 public:
  GradedWalshVector(int n, int max_grade);

  int vars() const { return n_; }
  int max_grade() const { return max_grade_; }

  static GradedWalshVector unit(int n, int max_grade);

  const std::vector<std::pair<std::uint32_t, double>>& grade(int k) const;
  void set(int grade, std::uint32_t mask, double value);
  double coefficient(std::uint32_t mask) const;

  std::size_t support_size() const;

  /// Lossless for grades <= max_grade when the dense vector carries no
  /// higher-grade mass (checked; throws otherwise).
  static GradedWalshVector from_dense(const WalshVector& dense, int max_grade);
  WalshVector to_dense() const;

  /// Wick product with a grade-1 vector given by per-index weights
  /// (weights[i-1] multiplies xi_i): shifts every stored grade up by one.
  /// support_budget caps the total stored coefficients; exceeded -> CapacityError.
  GradedWalshVector wick_product_grade1(const std::vector<double>& weights,
                                        std::size_t support_budget) const;

  GradedWalshVector& axpy(double a, const GradedWalshVector& other);

 private:
  int n_;
  int max_grade_;
  // grades_[k]: sorted by mask
  std::vector<std::vector<std::pair<std::uint32_t, double>>> grades_;
};

}  // namespace wickfbm
