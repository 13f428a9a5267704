#pragma once

#include <cstdint>
#include <vector>

#include "kernel.hpp"
#include "series.hpp"

namespace wickfbm {

/// Hermite polynomial with parameter sigma^2:
/// h^0 = 1, h^1 = x, h^{N+1} = x h^N - N sigma^2 h^{N-1}, iterated.
double hermite_poly(int N, double sigma2, double x);

/// Smallest K whose orthogonality-norm tail sum_{k>K} (C sigma)^{2k} / k!
/// drops below tail_tol^2; throws if the tolerance is unreachable.
int wick_series_truncation(double growth_bound, double sigma2, double tail_tol);

/// L2 bound on the dropped tail of the truncated functional.
double wick_series_tail_bound(double growth_bound, double sigma2, int K);

/// Truncated Wick analytic functional of a Gaussian value:
/// sum_{k<=K} a_k / k! * h^k_{sigma^2}(x).
double gaussian_wick_functional(const SeriesCoeffs& coeffs, double sigma2, double x, int K);

/// Seeded i.i.d. samples of the limit marginal of the functional at time t:
/// gaussian_wick_functional with sigma^2 = t^{2H} evaluated at x ~ N(0, t^{2H}),
/// scaled by `scale`. Truncation is chosen from tail_tol and reported through
/// truncation_out / tail_bound_out when non-null. Sample j of stream `stream`
/// is a pure function of (seed, stream, j).
std::vector<double> limit_marginal_samples(const SeriesCoeffs& coeffs, HurstParam H,
                                           double t, std::size_t count,
                                           std::uint64_t seed, double scale = 1.0,
                                           std::uint64_t stream = 0,
                                           double tail_tol = 1e-10,
                                           int* truncation_out = nullptr,
                                           double* tail_bound_out = nullptr);

}  // namespace wickfbm
