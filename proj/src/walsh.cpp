#include "walsh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace wickfbm {

namespace {

void require_dense_size(int n) {
  if (n < 1 || n > kDenseWalshMaxVars) {
    throw CapacityError("dense Walsh engine supports 1 <= n <= " +
                        std::to_string(kDenseWalshMaxVars) + ", got " + std::to_string(n));
  }
}

void require_same_vars(int a, int b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Path::Path(int n, std::vector<int8_t> signs) : n_(n), signs_(std::move(signs)) {
  if (n < 1) throw std::invalid_argument("Path: n must be >= 1");
  if (signs_.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("Path: sign count does not match n");
  }
  for (int8_t s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("Path: entries must be +-1");
  }
}

WalshVector::WalshVector(int n) : n_(n) {
  require_dense_size(n);
  coeffs_.assign(std::size_t{1} << n, 0.0);
}

WalshVector WalshVector::unit(int n) {
  WalshVector v(n);
  v.coeffs_[0] = 1.0;
  return v;
}

WalshVector WalshVector::basis(int n, std::uint32_t mask) {
  WalshVector v(n);
  if (mask >= v.coeffs_.size()) throw std::out_of_range("WalshVector::basis: mask out of range");
  v.coeffs_[mask] = 1.0;
  return v;
}

WalshVector& WalshVector::operator+=(const WalshVector& other) {
  require_same_vars(n_, other.n_, "WalshVector::operator+=");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
  return *this;
}

WalshVector& WalshVector::operator-=(const WalshVector& other) {
  require_same_vars(n_, other.n_, "WalshVector::operator-=");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
  return *this;
}

WalshVector& WalshVector::operator*=(double scalar) {
  for (double& c : coeffs_) c *= scalar;
  return *this;
}

WalshVector operator+(WalshVector a, const WalshVector& b) { return a += b; }
WalshVector operator-(WalshVector a, const WalshVector& b) { return a -= b; }
WalshVector operator*(double s, WalshVector a) { return a *= s; }

void WalshVector::dump(std::ostream& os) const {
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    if (coeffs_[m] == 0.0) continue;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", coeffs_[m]);
    os << m << '\t' << buf << '\n';
  }
}

WalshVector wick_product(const WalshVector& x, const WalshVector& y) {
  require_same_vars(x.vars(), y.vars(), "wick_product");
  const int n = x.vars();
  WalshVector out(n);
  const std::uint32_t full = static_cast<std::uint32_t>((std::size_t{1} << n) - 1);
  for (std::uint32_t c = 0; c <= full; ++c) {
    // enumerate submasks a of c; pair (a, c \ a) is always a disjoint split
    double sum = 0.0;
    std::uint32_t a = c;
    for (;;) {
      sum += x[a] * y[c ^ a];
      if (a == 0) break;
      a = (a - 1) & c;
    }
    out[c] = sum;
  }
  return out;
}

WalshVector wick_product_grade1(const WalshVector& x, std::span<const double> weights) {
  const int n = x.vars();
  if (weights.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("wick_product_grade1: weight count does not match n");
  }
  WalshVector out(n);
  for (int i = 0; i < n; ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (w == 0.0) continue;
    const std::uint32_t bit = std::uint32_t{1} << i;
    const std::size_t size = std::size_t{1} << n;
    for (std::size_t a = 0; a < size; ++a) {
      if (a & bit) continue;
      out[static_cast<std::uint32_t>(a | bit)] += x[static_cast<std::uint32_t>(a)] * w;
    }
  }
  return out;
}

WalshVector wick_power(const WalshVector& x, int k) {
  if (k < 0) throw std::invalid_argument("wick_power: k must be >= 0");
  WalshVector out = WalshVector::unit(x.vars());
  for (int j = 0; j < k; ++j) out = wick_product(out, x);
  return out;
}

WalshVector pointwise_product(const WalshVector& x, const WalshVector& y) {
  require_same_vars(x.vars(), y.vars(), "pointwise_product");
  const int n = x.vars();
  WalshVector out(n);
  const std::size_t size = std::size_t{1} << n;
  for (std::size_t a = 0; a < size; ++a) {
    const double xa = x[static_cast<std::uint32_t>(a)];
    if (xa == 0.0) continue;
    for (std::size_t b = 0; b < size; ++b) {
      out[static_cast<std::uint32_t>(a ^ b)] += xa * y[static_cast<std::uint32_t>(b)];
    }
  }
  return out;
}

double inner_product(const WalshVector& x, const WalshVector& y) {
  require_same_vars(x.vars(), y.vars(), "inner_product");
  double sum = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    sum += x[static_cast<std::uint32_t>(m)] * y[static_cast<std::uint32_t>(m)];
  }
  return sum;
}

double expectation(const WalshVector& x) { return x[0]; }

double l2_norm2(const WalshVector& x) { return inner_product(x, x); }

double evaluate(const WalshVector& x, const Path& p) {
  require_same_vars(x.vars(), p.vars(), "evaluate");
  const std::size_t size = x.size();
  // sign of Xi_A built incrementally: drop the lowest bit of the mask
  std::vector<int8_t> sgn(size);
  sgn[0] = 1;
  double sum = x[0];
  for (std::size_t m = 1; m < size; ++m) {
    const int low = std::countr_zero(m);
    sgn[m] = static_cast<int8_t>(sgn[m & (m - 1)] * p.sign(low + 1));
    sum += x[static_cast<std::uint32_t>(m)] * sgn[m];
  }
  return sum;
}

WalshVector random_walk_vector(const KernelGrid& grid, double t) {
  const int n = grid.steps();
  require_dense_size(n);
  const int l = grid.lattice_index(t);
  WalshVector out(n);
  for (int i = 1; i <= l; ++i) out[std::uint32_t{1} << (i - 1)] = grid.b(l, i);
  return out;
}

WalshVector increment_vector(const KernelGrid& grid, int l) {
  const int n = grid.steps();
  require_dense_size(n);
  if (l < 1 || l > n) throw std::out_of_range("increment_vector: step out of range");
  WalshVector out(n);
  for (int i = 1; i <= l; ++i) out[std::uint32_t{1} << (i - 1)] = grid.d(l, i);
  return out;
}

GradedWalshVector::GradedWalshVector(int n, int max_grade)
    : n_(n), max_grade_(max_grade) {
  if (n < 1 || n > 32) throw std::invalid_argument("GradedWalshVector: n out of range");
  if (max_grade < 0 || max_grade > n) {
    throw std::invalid_argument("GradedWalshVector: max_grade out of range");
  }
  grades_.resize(static_cast<std::size_t>(max_grade) + 1);
}

GradedWalshVector GradedWalshVector::unit(int n, int max_grade) {
  GradedWalshVector v(n, max_grade);
  v.grades_[0].emplace_back(0u, 1.0);
  return v;
}

const std::vector<std::pair<std::uint32_t, double>>& GradedWalshVector::grade(int k) const {
  if (k < 0 || k > max_grade_) throw std::out_of_range("GradedWalshVector::grade");
  return grades_[static_cast<std::size_t>(k)];
}

void GradedWalshVector::set(int grade, std::uint32_t mask, double value) {
  if (grade < 0 || grade > max_grade_) throw std::out_of_range("GradedWalshVector::set");
  if (std::popcount(mask) != grade) {
    throw std::invalid_argument("GradedWalshVector::set: popcount(mask) != grade");
  }
  auto& bucket = grades_[static_cast<std::size_t>(grade)];
  auto it = std::lower_bound(bucket.begin(), bucket.end(), mask,
                             [](const auto& p, std::uint32_t m) { return p.first < m; });
  if (it != bucket.end() && it->first == mask) {
    it->second = value;
  } else {
    bucket.insert(it, {mask, value});
  }
}

double GradedWalshVector::coefficient(std::uint32_t mask) const {
  const int g = std::popcount(mask);
  if (g > max_grade_) return 0.0;
  const auto& bucket = grades_[static_cast<std::size_t>(g)];
  auto it = std::lower_bound(bucket.begin(), bucket.end(), mask,
                             [](const auto& p, std::uint32_t m) { return p.first < m; });
  if (it != bucket.end() && it->first == mask) return it->second;
  return 0.0;
}

std::size_t GradedWalshVector::support_size() const {
  std::size_t total = 0;
  for (const auto& bucket : grades_) total += bucket.size();
  return total;
}

GradedWalshVector GradedWalshVector::from_dense(const WalshVector& dense, int max_grade) {
  GradedWalshVector out(dense.vars(), max_grade);
  for (std::size_t m = 0; m < dense.size(); ++m) {
    const double c = dense[static_cast<std::uint32_t>(m)];
    if (c == 0.0) continue;
    const int g = std::popcount(m);
    if (g > max_grade) {
      throw std::invalid_argument(
          "GradedWalshVector::from_dense: dense vector has mass above max_grade");
    }
    out.grades_[static_cast<std::size_t>(g)].emplace_back(static_cast<std::uint32_t>(m), c);
  }
  return out;  // masks visited in increasing order, buckets stay sorted
}

WalshVector GradedWalshVector::to_dense() const {
  WalshVector out(n_);
  for (const auto& bucket : grades_) {
    for (const auto& [mask, c] : bucket) out[mask] += c;
  }
  return out;
}

GradedWalshVector GradedWalshVector::wick_product_grade1(
    const std::vector<double>& weights, std::size_t support_budget) const {
  if (weights.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("wick_product_grade1: weight count does not match n");
  }
  // every stored grade shifts up by one
  const int out_grade = std::min(max_grade_ + 1, n_);
  GradedWalshVector out(n_, out_grade);
  for (int k = 0; k <= max_grade_ && k < out_grade; ++k) {
    const auto& src = grades_[static_cast<std::size_t>(k)];
    if (src.empty()) continue;
    std::map<std::uint32_t, double> acc;
    for (const auto& [mask, c] : src) {
      for (int i = 1; i <= n_; ++i) {
        const double w = weights[static_cast<std::size_t>(i - 1)];
        if (w == 0.0) continue;
        const std::uint32_t bit = std::uint32_t{1} << (i - 1);
        if (mask & bit) continue;  // overlapping index sets annihilate
        acc[mask | bit] += c * w;
      }
    }
    auto& dst = out.grades_[static_cast<std::size_t>(k + 1)];
    dst.assign(acc.begin(), acc.end());
    if (out.support_size() > support_budget) {
      throw CapacityError("graded Wick product support exceeds budget (" +
                          std::to_string(support_budget) + ")");
    }
  }
  return out;
}

GradedWalshVector& GradedWalshVector::axpy(double a, const GradedWalshVector& other) {
  if (other.n_ != n_) throw std::invalid_argument("GradedWalshVector::axpy: dimension mismatch");
  const int top = std::min(max_grade_, other.max_grade_);
  for (int k = 0; k <= top; ++k) {
    const auto& src = other.grades_[static_cast<std::size_t>(k)];
    if (src.empty()) continue;
    auto& dst = grades_[static_cast<std::size_t>(k)];
    std::vector<std::pair<std::uint32_t, double>> merged;
    merged.reserve(dst.size() + src.size());
    std::size_t p = 0, q = 0;
    while (p < dst.size() || q < src.size()) {
      if (q == src.size() || (p < dst.size() && dst[p].first < src[q].first)) {
        merged.push_back(dst[p++]);
      } else if (p == dst.size() || src[q].first < dst[p].first) {
        merged.emplace_back(src[q].first, a * src[q].second);
        ++q;
      } else {
        merged.emplace_back(dst[p].first, dst[p].second + a * src[q].second);
        ++p;
        ++q;
      }
    }
    dst = std::move(merged);
  }
  return *this;
}

}  // namespace wickfbm
