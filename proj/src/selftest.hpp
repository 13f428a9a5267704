#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace wickfbm {

struct SelftestOptions {
  double hurst = 0.75;
  std::uint64_t seed = 0x5eedULL;
  double tol = 1e-9;
};

using SelftestLog = std::function<void(const std::string&)>;

/// Runs the small-n invariant suites (Walsh algebra, symfun/dense engine
/// equivalence, the recursion closed forms, the discrete Hermite residual,
/// the increment-moment inequality) and returns the number of failures.
int run_selftest(const SelftestOptions& opts, const SelftestLog& log);

}  // namespace wickfbm
