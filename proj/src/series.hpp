#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace wickfbm {

/// Coefficient sequence a_0, a_1, ... of a Wick analytic functional together
/// with a certified growth bound |a_k| <= C^k. The bound is what makes the
/// functional square-integrable, so it is re-checked on access.
///
/// Consumers that combine a_k with k-fold products should use normalized(),
/// which returns a_k / C^k in [-1, 1]: the raw sequence can overflow double
/// range long before the functional itself does.
class SeriesCoeffs {
 public:
  SeriesCoeffs(std::function<double(int)> a, double growth_bound, std::string label)
      : SeriesCoeffs(std::move(a), nullptr, growth_bound, std::move(label)) {}

  /// `normalized` must return a_k / C^k exactly; pass it when the sequence is
  /// generated by a recursion that is stable in normalized form.
  SeriesCoeffs(std::function<double(int)> a, std::function<double(int)> normalized,
               double growth_bound, std::string label)
      : a_(std::move(a)),
        normalized_(std::move(normalized)),
        growth_(growth_bound),
        label_(std::move(label)) {
    if (!a_) throw std::invalid_argument("SeriesCoeffs: missing coefficient function");
    if (!(growth_ > 0.0)) {
      throw std::invalid_argument("SeriesCoeffs: growth certificate must be positive");
    }
  }

  double operator()(int k) const {
    if (k < 0) throw std::invalid_argument("SeriesCoeffs: k must be >= 0");
    const double v = a_(k);
    const double cap = std::pow(growth_, k);
    if (std::abs(v) > cap * (1.0 + 1e-12) + 1e-300) {
      throw std::logic_error("SeriesCoeffs(" + label_ + "): |a_" + std::to_string(k) +
                             "| violates the growth certificate");
    }
    return v;
  }

  double normalized(int k) const {
    if (k < 0) throw std::invalid_argument("SeriesCoeffs: k must be >= 0");
    const double v = normalized_ ? normalized_(k) : a_(k) / std::pow(growth_, k);
    if (!(std::abs(v) <= 1.0 + 1e-9)) {
      throw std::logic_error("SeriesCoeffs(" + label_ + "): normalized coefficient " +
                             std::to_string(k) + " violates the growth certificate");
    }
    return v;
  }

  double growth_bound() const { return growth_; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(int)> a_;
  std::function<double(int)> normalized_;
  double growth_;
  std::string label_;
};

}  // namespace wickfbm
