#include "wickfbm.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <sstream>
#include <string>

#include "hermite.hpp"
#include "kernel.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "schemes.hpp"
#include "selftest.hpp"
#include "symfun.hpp"
#include "walsh.hpp"

namespace {

thread_local std::string g_last_error;

struct GridHandle {
  wickfbm::KernelGrid grid;
};

struct WalshHandle {
  wickfbm::WalshVector vec;
};

wfbm_status fail(wfbm_status code, const char* what) {
  g_last_error = what != nullptr ? what : "";
  return code;
}

template <class Fn>
wfbm_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(WFBM_ERR_INVALID, e.what());
  } catch (const std::out_of_range& e) {
    return fail(WFBM_ERR_INVALID, e.what());
  } catch (const wickfbm::QuadratureError& e) {
    return fail(WFBM_ERR_QUADRATURE, e.what());
  } catch (const wickfbm::CapacityError& e) {
    return fail(WFBM_ERR_CAPACITY, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(WFBM_ERR_IO, e.what());
  } catch (const std::runtime_error& e) {
    // file-shaped failures surface as runtime_error from the loaders
    const std::string what = e.what();
    if (what.find("load") != std::string::npos || what.find("save") != std::string::npos ||
        what.find("open") != std::string::npos) {
      return fail(WFBM_ERR_IO, e.what());
    }
    return fail(WFBM_ERR_INTERNAL, e.what());
  } catch (const std::exception& e) {
    return fail(WFBM_ERR_INTERNAL, e.what());
  }
}

wickfbm::SchemeSpec to_spec(const wfbm_scheme_spec& c) {
  wickfbm::SchemeSpec s;
  switch (c.variant) {
    case WFBM_SCHEME_GEOMETRIC: s = wickfbm::SchemeSpec::geometric(); break;
    case WFBM_SCHEME_DRIFT: s = wickfbm::SchemeSpec::drift(c.mu, c.sigma, c.s0); break;
    case WFBM_SCHEME_LINEAR_SYSTEM:
      s = wickfbm::SchemeSpec::linear_system(c.a1, c.a2, c.b1, c.b2, c.x0, c.y0);
      break;
    case WFBM_SCHEME_SIN_COS: s = wickfbm::SchemeSpec::sin_cos(); break;
    case WFBM_SCHEME_PATHWISE: s = wickfbm::SchemeSpec::pathwise(); break;
    default:
      throw std::invalid_argument("unknown scheme variant " + std::to_string(c.variant));
  }
  return s;
}

int32_t to_c_status(wickfbm::CheckStatus s) {
  switch (s) {
    case wickfbm::CheckStatus::pass: return WFBM_CHECK_PASS;
    case wickfbm::CheckStatus::fail: return WFBM_CHECK_FAIL;
    case wickfbm::CheckStatus::skipped: return WFBM_CHECK_SKIPPED;
  }
  return WFBM_CHECK_SKIPPED;
}

wickfbm::StudyConfig to_study_config(const wfbm_study_config& c) {
  wickfbm::StudyConfig cfg;
  cfg.hurst = c.hurst;
  if (c.n_list != nullptr && c.n_count > 0) {
    cfg.n_list.assign(c.n_list, c.n_list + c.n_count);
  }
  cfg.scheme = to_spec(c.scheme);
  if (c.times != nullptr && c.time_count > 0) {
    cfg.times.assign(c.times, c.times + c.time_count);
  }
  cfg.paths = static_cast<std::size_t>(c.paths);
  cfg.seed = c.seed;
  cfg.tol = c.tol;
  cfg.cache_dir = c.cache_dir != nullptr ? c.cache_dir : "";
  cfg.max_inequality_order = c.max_inequality_order;
  cfg.threads = c.threads;
  return cfg;
}

}  // namespace

extern "C" {

const char* wfbm_version(void) { return "0.1.0"; }

const char* wfbm_last_error(void) { return g_last_error.c_str(); }

wfbm_status wfbm_grid_build(double hurst, int32_t n, double tol, wfbm_grid** out) {
  if (out == nullptr) return fail(WFBM_ERR_INVALID, "out must not be NULL");
  *out = nullptr;
  return guarded([&]() {
    auto grid = wickfbm::KernelGrid::build(wickfbm::HurstParam(hurst), n, tol);
    *out = reinterpret_cast<wfbm_grid*>(new GridHandle{std::move(grid)});
    return WFBM_OK;
  });
}

wfbm_status wfbm_grid_load(const char* path, wfbm_grid** out) {
  if (out == nullptr || path == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  *out = nullptr;
  return guarded([&]() {
    auto grid = wickfbm::KernelGrid::load(path);
    *out = reinterpret_cast<wfbm_grid*>(new GridHandle{std::move(grid)});
    return WFBM_OK;
  });
}

wfbm_status wfbm_grid_save(const wfbm_grid* grid, const char* path) {
  if (grid == nullptr || path == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  return guarded([&]() {
    reinterpret_cast<const GridHandle*>(grid)->grid.save(path);
    return WFBM_OK;
  });
}

wfbm_status wfbm_grid_load_or_build(double hurst, int32_t n, double tol,
                                    const char* cache_dir, wfbm_grid** out) {
  if (out == nullptr) return fail(WFBM_ERR_INVALID, "out must not be NULL");
  *out = nullptr;
  return guarded([&]() {
    auto grid = wickfbm::KernelGrid::load_or_build(
        wickfbm::HurstParam(hurst), n, tol, cache_dir != nullptr ? cache_dir : "");
    *out = reinterpret_cast<wfbm_grid*>(new GridHandle{std::move(grid)});
    return WFBM_OK;
  });
}

void wfbm_grid_free(wfbm_grid* grid) { delete reinterpret_cast<GridHandle*>(grid); }

int32_t wfbm_grid_steps(const wfbm_grid* grid) {
  if (grid == nullptr) return 0;
  return reinterpret_cast<const GridHandle*>(grid)->grid.steps();
}

double wfbm_grid_hurst(const wfbm_grid* grid) {
  if (grid == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return reinterpret_cast<const GridHandle*>(grid)->grid.hurst().value();
}

double wfbm_grid_tol(const wfbm_grid* grid) {
  if (grid == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return reinterpret_cast<const GridHandle*>(grid)->grid.tol();
}

double wfbm_grid_coefficient(const wfbm_grid* grid, int32_t l, int32_t i) {
  if (grid == nullptr) return std::numeric_limits<double>::quiet_NaN();
  const auto& g = reinterpret_cast<const GridHandle*>(grid)->grid;
  if (l < 0 || l > g.steps() || i < 1 || i > g.steps()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return g.b(l, i);
}

double wfbm_grid_increment(const wfbm_grid* grid, int32_t l, int32_t i) {
  if (grid == nullptr) return std::numeric_limits<double>::quiet_NaN();
  const auto& g = reinterpret_cast<const GridHandle*>(grid)->grid;
  if (l < 1 || l > g.steps() || i < 1 || i > g.steps()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return g.d(l, i);
}

wfbm_status wfbm_grid_covariance(const wfbm_grid* grid, double t, double s, double* out) {
  if (grid == nullptr || out == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  return guarded([&]() {
    *out = reinterpret_cast<const GridHandle*>(grid)->grid.covariance(t, s);
    return WFBM_OK;
  });
}

wfbm_status wfbm_fbm_covariance(double hurst, double t, double s, double* out) {
  if (out == nullptr) return fail(WFBM_ERR_INVALID, "out must not be NULL");
  return guarded([&]() {
    *out = wickfbm::fbm_covariance(wickfbm::HurstParam(hurst), t, s);
    return WFBM_OK;
  });
}

wfbm_status wfbm_molchan_golosov_constant(double hurst, double* out) {
  if (out == nullptr) return fail(WFBM_ERR_INVALID, "out must not be NULL");
  return guarded([&]() {
    *out = wickfbm::molchan_golosov_constant(wickfbm::HurstParam(hurst));
    return WFBM_OK;
  });
}

wfbm_status wfbm_kernel_z(double hurst, double t, double s, double rel_tol, double* out) {
  if (out == nullptr) return fail(WFBM_ERR_INVALID, "out must not be NULL");
  return guarded([&]() {
    *out = wickfbm::kernel_z(wickfbm::HurstParam(hurst), t, s, rel_tol);
    return WFBM_OK;
  });
}

void wfbm_scheme_spec_init(wfbm_scheme_spec* spec) {
  if (spec == nullptr) return;
  std::memset(spec, 0, sizeof(*spec));
  spec->variant = WFBM_SCHEME_GEOMETRIC;
  spec->sigma = 1.0;
  spec->s0 = 1.0;
}

wfbm_status wfbm_simulate(const wfbm_grid* grid, const wfbm_scheme_spec* spec,
                          const double* times, size_t n_times, uint64_t paths,
                          uint64_t seed, double* values_first, double* values_second) {
  if (grid == nullptr || spec == nullptr || times == nullptr || values_first == nullptr) {
    return fail(WFBM_ERR_INVALID, "NULL argument");
  }
  if (n_times == 0) return fail(WFBM_ERR_INVALID, "n_times must be >= 1");
  if (paths == 0) return fail(WFBM_ERR_INVALID, "paths must be >= 1");
  return guarded([&]() {
    const auto& g = reinterpret_cast<const GridHandle*>(grid)->grid;
    const wickfbm::SchemeSpec scheme = to_spec(*spec);
    if (scheme.is_system() && values_second == nullptr) {
      throw std::invalid_argument("system scheme requires values_second");
    }
    for (uint64_t p = 0; p < paths; ++p) {
      const wickfbm::Path path = wickfbm::sample_path(g.steps(), seed, p);
      for (size_t k = 0; k < n_times; ++k) {
        const wickfbm::SchemePathValue v =
            wickfbm::scheme_series_path(g, scheme, times[k], path);
        values_first[p * n_times + k] = v.first;
        if (values_second != nullptr) {
          values_second[p * n_times + k] = v.has_second ? v.second : 0.0;
        }
      }
    }
    return WFBM_OK;
  });
}

wfbm_status wfbm_limit_marginal_sample(const wfbm_scheme_spec* spec, double hurst,
                                       double t, uint64_t count, uint64_t seed,
                                       double* out) {
  if (spec == nullptr || out == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  if (count == 0) return fail(WFBM_ERR_INVALID, "count must be >= 1");
  return guarded([&]() {
    const wickfbm::SchemeSpec scheme = to_spec(*spec);
    const wickfbm::SchemeSeries series = wickfbm::scheme_limit_series(scheme, t);
    const std::vector<double> samples = wickfbm::limit_marginal_samples(
        series.coeffs, wickfbm::HurstParam(hurst), t, static_cast<std::size_t>(count),
        seed, series.scale);
    std::memcpy(out, samples.data(), samples.size() * sizeof(double));
    return WFBM_OK;
  });
}

wfbm_status wfbm_sample_path(int32_t n, uint64_t seed, uint64_t index, int8_t* signs) {
  if (signs == nullptr) return fail(WFBM_ERR_INVALID, "signs must not be NULL");
  if (n < 1) return fail(WFBM_ERR_INVALID, "n must be >= 1");
  return guarded([&]() {
    const wickfbm::Path p = wickfbm::sample_path(n, seed, index);
    std::memcpy(signs, p.signs().data(), static_cast<std::size_t>(n));
    return WFBM_OK;
  });
}

wfbm_status wfbm_scheme_solve_exact(const wfbm_grid* grid, const wfbm_scheme_spec* spec,
                                    int32_t step, wfbm_walsh** first,
                                    wfbm_walsh** second) {
  if (grid == nullptr || spec == nullptr || first == nullptr) {
    return fail(WFBM_ERR_INVALID, "NULL argument");
  }
  *first = nullptr;
  if (second != nullptr) *second = nullptr;
  return guarded([&]() {
    const auto& g = reinterpret_cast<const GridHandle*>(grid)->grid;
    if (step < 0 || step > g.steps()) throw std::invalid_argument("step out of range");
    const wickfbm::SchemeSpec scheme = to_spec(*spec);
    if (scheme.is_system() && second == nullptr) {
      throw std::invalid_argument("system scheme requires a second output handle");
    }
    wickfbm::ExactSchemeSolution sol = wickfbm::solve_scheme_exact(g, scheme);
    *first = reinterpret_cast<wfbm_walsh*>(
        new WalshHandle{std::move(sol.first[static_cast<std::size_t>(step)])});
    if (scheme.is_system() && second != nullptr) {
      *second = reinterpret_cast<wfbm_walsh*>(
          new WalshHandle{std::move(sol.second[static_cast<std::size_t>(step)])});
    }
    return WFBM_OK;
  });
}

void wfbm_walsh_free(wfbm_walsh* w) { delete reinterpret_cast<WalshHandle*>(w); }

int32_t wfbm_walsh_vars(const wfbm_walsh* w) {
  if (w == nullptr) return 0;
  return reinterpret_cast<const WalshHandle*>(w)->vec.vars();
}

double wfbm_walsh_coefficient(const wfbm_walsh* w, uint32_t mask) {
  if (w == nullptr) return std::numeric_limits<double>::quiet_NaN();
  const auto& v = reinterpret_cast<const WalshHandle*>(w)->vec;
  if (mask >= v.size()) return std::numeric_limits<double>::quiet_NaN();
  return v[mask];
}

double wfbm_walsh_expectation(const wfbm_walsh* w) {
  if (w == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return wickfbm::expectation(reinterpret_cast<const WalshHandle*>(w)->vec);
}

wfbm_status wfbm_walsh_inner(const wfbm_walsh* a, const wfbm_walsh* b, double* out) {
  if (a == nullptr || b == nullptr || out == nullptr) {
    return fail(WFBM_ERR_INVALID, "NULL argument");
  }
  return guarded([&]() {
    *out = wickfbm::inner_product(reinterpret_cast<const WalshHandle*>(a)->vec,
                                  reinterpret_cast<const WalshHandle*>(b)->vec);
    return WFBM_OK;
  });
}

wfbm_status wfbm_walsh_evaluate(const wfbm_walsh* w, const int8_t* signs, size_t n,
                                double* out) {
  if (w == nullptr || signs == nullptr || out == nullptr) {
    return fail(WFBM_ERR_INVALID, "NULL argument");
  }
  return guarded([&]() {
    const auto& v = reinterpret_cast<const WalshHandle*>(w)->vec;
    if (n != static_cast<size_t>(v.vars())) {
      throw std::invalid_argument("sign count does not match the vector");
    }
    const wickfbm::Path p(v.vars(), std::vector<int8_t>(signs, signs + n));
    *out = wickfbm::evaluate(v, p);
    return WFBM_OK;
  });
}

wfbm_status wfbm_walsh_dump(const wfbm_walsh* w, char* buf, size_t cap, size_t* written) {
  if (w == nullptr || written == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  return guarded([&]() {
    std::ostringstream os;
    reinterpret_cast<const WalshHandle*>(w)->vec.dump(os);
    const std::string text = os.str();
    *written = text.size();
    if (buf != nullptr && cap > 0) {
      const size_t copy = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), copy);
      buf[copy] = '\0';
    }
    return WFBM_OK;
  });
}

wfbm_status wfbm_selftest(double hurst, uint64_t seed, wfbm_log_fn log, void* user) {
  return guarded([&]() {
    wickfbm::SelftestOptions opts;
    opts.hurst = hurst;
    opts.seed = seed;
    wickfbm::SelftestLog logger;
    if (log != nullptr) {
      logger = [log, user](const std::string& line) { log(line.c_str(), user); };
    }
    const int failures = wickfbm::run_selftest(opts, logger);
    if (failures > 0) {
      g_last_error = std::to_string(failures) + " selftest failure(s)";
      return WFBM_ERR_CHECK_FAILED;
    }
    return WFBM_OK;
  });
}

void wfbm_study_config_init(wfbm_study_config* cfg) {
  if (cfg == nullptr) return;
  std::memset(cfg, 0, sizeof(*cfg));
  cfg->hurst = 0.75;
  wfbm_scheme_spec_init(&cfg->scheme);
  cfg->paths = 10000;
  cfg->seed = 1;
  cfg->tol = 1e-9;
  cfg->max_inequality_order = 10;
}

wfbm_status wfbm_study_converge(const wfbm_study_config* cfg, wfbm_study_row_fn fn,
                                void* user) {
  if (cfg == nullptr || fn == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  if (cfg->n_list == nullptr || cfg->times == nullptr) {
    return fail(WFBM_ERR_INVALID, "n_list and times must not be NULL");
  }
  return guarded([&]() {
    const std::vector<wickfbm::StudyRow> rows = wickfbm::run_study(to_study_config(*cfg));
    for (const wickfbm::StudyRow& r : rows) {
      wfbm_study_row c;
      c.n = r.n;
      c.t = r.t;
      c.cov_abs_error = r.cov_abs_error;
      c.mean = r.mean;
      c.variance = r.variance;
      c.std_error = r.std_error;
      c.ks = r.ks;
      c.increment_bound = to_c_status(r.increment_bound);
      c.moment_defect = to_c_status(r.moment_defect);
      c.series_vs_recursion = to_c_status(r.series_vs_recursion);
      fn(&c, user);
    }
    return WFBM_OK;
  });
}

wfbm_status wfbm_study_rate(const wfbm_study_config* cfg, wfbm_rate_row_fn fn,
                            void* user) {
  if (cfg == nullptr || fn == nullptr) return fail(WFBM_ERR_INVALID, "NULL argument");
  if (cfg->n_list == nullptr) return fail(WFBM_ERR_INVALID, "n_list must not be NULL");
  return guarded([&]() {
    wickfbm::StudyConfig c = to_study_config(*cfg);
    if (c.times.empty()) c.times.push_back(1.0);
    const wickfbm::RateStudy study = wickfbm::run_rate_study(c);
    for (const wickfbm::RateRow& r : study.rows) {
      wfbm_rate_row row;
      row.n = r.n;
      row.t = r.t;
      row.diff_norm2 = r.diff_norm2;
      row.bound = r.bound;
      row.slope = study.slope;
      fn(&row, user);
    }
    return WFBM_OK;
  });
}

}  // extern "C"
