#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "schemes.hpp"
#include "walsh.hpp"

namespace wickfbm {

/// Path `index` of the seeded family: coordinate i is a pure function of
/// (seed, index, i).
Path sample_path(int n, std::uint64_t seed, std::uint64_t index);

std::vector<Path> sample_paths(int n, std::size_t count, std::uint64_t seed);

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;   // unbiased
  double std_error = 0.0;  // of the mean
  std::size_t count = 0;
};

/// Standard estimators; requires at least two values. Sums use a fixed
/// pairwise tree so results do not depend on how the values were produced.
MomentReport moment_report(std::span<const double> values);

/// Standard error of the sample variance, from the fourth central moment.
double variance_std_error(std::span<const double> values);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Deterministic pairwise tree sum (thread-count independent reduction).
double tree_sum(std::span<const double> values);

enum class CheckStatus { pass, fail, skipped };
const char* to_string(CheckStatus s);

struct StudyConfig {
  double hurst = 0.75;
  std::vector<int> n_list;
  SchemeSpec scheme = SchemeSpec::geometric();
  std::vector<double> times;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string cache_dir;          // empty: rebuild grids, no disk cache
  int max_inequality_order = 10;  // largest N for the inequality sweeps
  int threads = 0;                // 0: hardware concurrency

  // Raw coefficient family evaluated instead of the named scheme when set;
  // the family is used as-is for every n.
  std::shared_ptr<SeriesCoeffs> custom_series;
  double custom_scale = 1.0;

  void validate() const;
};

struct StudyRow {
  int n = 0;
  double t = 0.0;
  double cov_abs_error = 0.0;  // max_s |discrete - fbm covariance| over the time grid
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double ks = 0.0;  // scheme marginal vs limit marginal; 0 when no limit series
  CheckStatus increment_bound = CheckStatus::skipped;   // 8^N lattice-gap inequality
  CheckStatus moment_defect = CheckStatus::skipped;     // covariance moment defect bounds
  CheckStatus series_vs_recursion = CheckStatus::skipped;  // exact rate bound (dense range)
};

/// One row per (n, t): covariance error, scheme marginal moments, KS distance
/// against the limit marginal, and the inequality check statuses reachable at
/// that size. Deterministic given the seed.
std::vector<StudyRow> run_study(const StudyConfig& cfg);

struct RateRow {
  int n = 0;
  double t = 0.0;
  double diff_norm2 = 0.0;
  double bound = 0.0;
};

struct RateStudy {
  std::vector<RateRow> rows;
  double slope = 0.0;  // log-log slope of diff_norm2 against n
};

/// Exact series-vs-recursion L2 differences over cfg.n_list (dense range
/// only) and the fitted log-log slope.
RateStudy run_rate_study(const StudyConfig& cfg);

}  // namespace wickfbm
