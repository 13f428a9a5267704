#include "montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hermite.hpp"
#include "rng.hpp"
#include "symfun.hpp"

namespace wickfbm {

Path sample_path(int n, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed);
  std::vector<int8_t> signs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    signs[static_cast<std::size_t>(i)] =
        static_cast<int8_t>(rng.sign(index, static_cast<std::uint64_t>(i)));
  }
  return Path(n, std::move(signs));
}

std::vector<Path> sample_paths(int n, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_paths: count must be >= 1");
  std::vector<Path> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) out.push_back(sample_path(n, seed, j));
  return out;
}

double tree_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return tree_sum(values.first(half)) + tree_sum(values.subspan(half));
}

MomentReport moment_report(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument("moment_report: need at least two values");
  }
  MomentReport rep;
  rep.count = values.size();
  const double n = static_cast<double>(values.size());
  rep.mean = tree_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - rep.mean;
    sq[i] = d * d;
  }
  rep.variance = tree_sum(sq) / (n - 1.0);
  rep.std_error = std::sqrt(rep.variance / n);
  return rep;
}

double variance_std_error(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument("variance_std_error: need at least two values");
  }
  const double n = static_cast<double>(values.size());
  const double mean = tree_sum(values) / n;
  std::vector<double> sq(values.size()), quad(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
    quad[i] = d * d * d * d;
  }
  const double m2 = tree_sum(sq) / n;
  const double m4 = tree_sum(quad) / n;
  return std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "unknown";
}

void StudyConfig::validate() const {
  if (n_list.empty()) throw std::invalid_argument("StudyConfig: n_list must not be empty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("StudyConfig: n_list must be strictly increasing");
    }
  }
  if (n_list.front() < 1) throw std::invalid_argument("StudyConfig: n must be >= 1");
  if (paths < 2) throw std::invalid_argument("StudyConfig: need at least two paths");
  for (double t : times) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("StudyConfig: times must lie in [0,1]");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("StudyConfig: tol must be > 0");
  HurstParam check(hurst);
  (void)check;
}

namespace {

// Per-path scheme values at time t, parallel over path indices; the output
// order is fixed by index so reductions stay deterministic.
std::vector<double> scheme_sample(const KernelGrid& grid, const StudyConfig& cfg,
                                  double t, std::size_t paths, std::uint64_t seed,
                                  int threads) {
  std::vector<double> values(paths);
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, 16);
  const int n = grid.steps();
  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Path p = sample_path(n, seed, j);
      if (cfg.custom_series) {
        values[j] = cfg.custom_scale * wick_series_path(grid, t, *cfg.custom_series, p);
      } else {
        values[j] = scheme_series_path(grid, cfg.scheme, t, p).first;
      }
    }
  };
  if (workers <= 1 || paths < 256) {
    fill(0, paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(paths, static_cast<std::size_t>(w) * chunk);
      const std::size_t hi = std::min(paths, lo + chunk);
      if (lo < hi) pool.emplace_back(fill, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return values;
}

CheckStatus merge(CheckStatus cur, bool ok) {
  if (cur == CheckStatus::fail) return cur;
  return ok ? CheckStatus::pass : CheckStatus::fail;
}

}  // namespace

std::vector<StudyRow> run_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<StudyRow> rows;
  const HurstParam H(cfg.hurst);

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    const KernelGrid grid = KernelGrid::load_or_build(H, n, cfg.tol, cfg.cache_dir);

    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
      const double t = cfg.times[ti];
      StudyRow row;
      row.n = n;
      row.t = t;

      double cov_err = 0.0;
      for (double s : cfg.times) {
        cov_err = std::max(cov_err, std::abs(grid.covariance(t, s) -
                                             fbm_covariance(H, t, s)));
      }
      row.cov_abs_error = cov_err;

      const std::uint64_t scheme_seed = cfg.seed + 1000003ull * ni + 7919ull * ti;
      const std::vector<double> sample =
          scheme_sample(grid, cfg, t, cfg.paths, scheme_seed, cfg.threads);
      const MomentReport rep = moment_report(sample);
      row.mean = rep.mean;
      row.variance = rep.variance;
      row.std_error = rep.std_error;

      if (t > 0.0 && (cfg.custom_series || cfg.scheme.variant != SchemeVariant::pathwise)) {
        const SchemeSeries limit = cfg.custom_series
                                       ? SchemeSeries{*cfg.custom_series, cfg.custom_scale}
                                       : scheme_limit_series(cfg.scheme, t);
        const std::vector<double> reference = limit_marginal_samples(
            limit.coeffs, H, t, cfg.paths, scheme_seed + 1, limit.scale, 1);
        row.ks = ks_distance(sample, reference);
      }

      // inequality sweeps over the configured times and orders
      row.increment_bound = CheckStatus::skipped;
      row.moment_defect = CheckStatus::skipped;
      for (double s : cfg.times) {
        for (int N = 1; N <= cfg.max_inequality_order; ++N) {
          const InequalityCheck chk = increment_moment_bound(grid, t, s, N);
          row.increment_bound = merge(row.increment_bound, chk.lhs <= chk.rhs + 1e-12);
          const int ls = grid.lattice_index(std::min(t, s));
          if (ls >= N && std::max(t, s) > 0.0) {
            const MomentDefect defect =
                covariance_moment_defect(grid, std::max(t, s), std::min(t, s), N);
            row.moment_defect = merge(row.moment_defect, defect.holds());
          }
        }
      }

      if (n <= kDenseWalshMaxVars && t > 0.0 &&
          (cfg.custom_series || cfg.scheme.variant != SchemeVariant::pathwise)) {
        const SeriesCoeffs series =
            cfg.custom_series
                ? *cfg.custom_series
                : scheme_discrete_series(cfg.scheme, n, grid.lattice_index(t)).coeffs;
        const DifferenceNorm diff = u_difference_norm(grid, series, t);
        row.series_vs_recursion =
            diff.norm2 <= diff.bound + 1e-12 ? CheckStatus::pass : CheckStatus::fail;
      }

      rows.push_back(row);
    }
  }
  return rows;
}

RateStudy run_rate_study(const StudyConfig& cfg) {
  cfg.validate();
  if (!cfg.custom_series && cfg.scheme.variant == SchemeVariant::pathwise) {
    throw std::invalid_argument("run_rate_study: pathwise scheme has no series");
  }
  const HurstParam H(cfg.hurst);
  const double t = cfg.times.empty() ? 1.0 : cfg.times.front();
  RateStudy study;
  std::vector<double> log_n, log_v;
  for (int n : cfg.n_list) {
    if (n > kDenseWalshMaxVars) {
      throw CapacityError("run_rate_study: n beyond the dense engine range");
    }
    const KernelGrid grid = KernelGrid::load_or_build(H, n, cfg.tol, cfg.cache_dir);
    const SeriesCoeffs series =
        cfg.custom_series ? *cfg.custom_series
                          : scheme_discrete_series(cfg.scheme, n, grid.lattice_index(t)).coeffs;
    const DifferenceNorm diff = u_difference_norm(grid, series, t);
    study.rows.push_back(RateRow{n, t, diff.norm2, diff.bound});
    if (diff.norm2 > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n)));
      log_v.push_back(std::log(diff.norm2));
    }
  }
  if (log_n.size() >= 2) {
    const double n_pts = static_cast<double>(log_n.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sx += log_n[i];
      sy += log_v[i];
      sxx += log_n[i] * log_n[i];
      sxy += log_n[i] * log_v[i];
    }
    study.slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
  } else {
    study.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return study;
}

}  // namespace wickfbm
