/*
 * wickfbm -- disturbed binary random walks, discrete Wick calculus, and
 * Wick difference schemes for fractional Brownian motion on [0, 1].
 *
 * C API of the shared library. All functions return WFBM_OK (0) on success
 * or one of the error codes below; wfbm_last_error() describes the most
 * recent failure on the calling thread. Handles are opaque and must be
 * released with their matching _free function.
 */
#ifndef WICKFBM_H
#define WICKFBM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define WFBM_OK 0
#define WFBM_ERR_INVALID 1      /* argument or configuration rejected */
#define WFBM_ERR_CHECK_FAILED 2 /* a verification suite reported failures */
#define WFBM_ERR_QUADRATURE 3   /* node doubling did not stabilize */
#define WFBM_ERR_CAPACITY 4     /* engine size budget exceeded */
#define WFBM_ERR_IO 5           /* file could not be read or written */
#define WFBM_ERR_INTERNAL 6

typedef int32_t wfbm_status;

const char* wfbm_version(void);
/* Thread-local message of the last failure; empty string if none. */
const char* wfbm_last_error(void);

/* ------------------------------------------------------------------ */
/* Kernel coefficient grids                                            */
/* ------------------------------------------------------------------ */

typedef struct wfbm_grid wfbm_grid;

wfbm_status wfbm_grid_build(double hurst, int32_t n, double tol, wfbm_grid** out);
wfbm_status wfbm_grid_load(const char* path, wfbm_grid** out);
wfbm_status wfbm_grid_save(const wfbm_grid* grid, const char* path);
/* Cache file under cache_dir keyed by (hurst, n, tol); builds on miss.
 * cache_dir == NULL or "" builds without caching. */
wfbm_status wfbm_grid_load_or_build(double hurst, int32_t n, double tol,
                                    const char* cache_dir, wfbm_grid** out);
void wfbm_grid_free(wfbm_grid* grid);

int32_t wfbm_grid_steps(const wfbm_grid* grid);
double wfbm_grid_hurst(const wfbm_grid* grid);
double wfbm_grid_tol(const wfbm_grid* grid);
/* b[l][i] and d[l][i]; zero for i > l, NaN for indices out of range. */
double wfbm_grid_coefficient(const wfbm_grid* grid, int32_t l, int32_t i);
double wfbm_grid_increment(const wfbm_grid* grid, int32_t l, int32_t i);
wfbm_status wfbm_grid_covariance(const wfbm_grid* grid, double t, double s, double* out);

wfbm_status wfbm_fbm_covariance(double hurst, double t, double s, double* out);
wfbm_status wfbm_molchan_golosov_constant(double hurst, double* out);
wfbm_status wfbm_kernel_z(double hurst, double t, double s, double rel_tol, double* out);

/* ------------------------------------------------------------------ */
/* Schemes                                                             */
/* ------------------------------------------------------------------ */

enum {
  WFBM_SCHEME_GEOMETRIC = 0,
  WFBM_SCHEME_DRIFT = 1,
  WFBM_SCHEME_LINEAR_SYSTEM = 2,
  WFBM_SCHEME_SIN_COS = 3,
  WFBM_SCHEME_PATHWISE = 4
};

typedef struct {
  int32_t variant; /* one of the WFBM_SCHEME_* values */
  double mu, sigma, s0;                 /* drift scheme */
  double a1, a2, b1, b2, x0, y0;        /* linear system */
} wfbm_scheme_spec;

/* Fills geometric-scheme defaults. */
void wfbm_scheme_spec_init(wfbm_scheme_spec* spec);

/* Per-path scheme values: values_first[p * n_times + k] receives the value of
 * path p at times[k]. values_second may be NULL unless the scheme is a
 * system. Paths are the seeded family: path p is a pure function of
 * (seed, p). */
wfbm_status wfbm_simulate(const wfbm_grid* grid, const wfbm_scheme_spec* spec,
                          const double* times, size_t n_times, uint64_t paths,
                          uint64_t seed, double* values_first, double* values_second);

/* Seeded i.i.d. samples of the scheme's weak-limit marginal at time t. */
wfbm_status wfbm_limit_marginal_sample(const wfbm_scheme_spec* spec, double hurst,
                                       double t, uint64_t count, uint64_t seed,
                                       double* out);

/* Coordinate signs (+-1) of seeded path `index`. */
wfbm_status wfbm_sample_path(int32_t n, uint64_t seed, uint64_t index, int8_t* signs);

/* ------------------------------------------------------------------ */
/* Dense Walsh handles                                                 */
/* ------------------------------------------------------------------ */

typedef struct wfbm_walsh wfbm_walsh;

/* Exact Walsh solution of a scheme at lattice step `step` (dense engine;
 * requires n <= 24). `second` may be NULL unless the scheme is a system. */
wfbm_status wfbm_scheme_solve_exact(const wfbm_grid* grid, const wfbm_scheme_spec* spec,
                                    int32_t step, wfbm_walsh** first,
                                    wfbm_walsh** second);
void wfbm_walsh_free(wfbm_walsh* w);

int32_t wfbm_walsh_vars(const wfbm_walsh* w);
double wfbm_walsh_coefficient(const wfbm_walsh* w, uint32_t mask);
double wfbm_walsh_expectation(const wfbm_walsh* w);
wfbm_status wfbm_walsh_inner(const wfbm_walsh* a, const wfbm_walsh* b, double* out);
/* signs must hold n entries of +-1. */
wfbm_status wfbm_walsh_evaluate(const wfbm_walsh* w, const int8_t* signs, size_t n,
                                double* out);
/* Debug dump, "mask<TAB>coefficient" lines sorted by mask, zero entries
 * omitted. Writes at most cap bytes including the terminating NUL; *written
 * receives the full size required (excluding the NUL). buf may be NULL to
 * query the size. */
wfbm_status wfbm_walsh_dump(const wfbm_walsh* w, char* buf, size_t cap, size_t* written);

/* ------------------------------------------------------------------ */
/* Verification and studies                                            */
/* ------------------------------------------------------------------ */

typedef void (*wfbm_log_fn)(const char* line, void* user);

/* Runs the small-n invariant suites; returns WFBM_OK when everything passes
 * and WFBM_ERR_CHECK_FAILED otherwise. log may be NULL. */
wfbm_status wfbm_selftest(double hurst, uint64_t seed, wfbm_log_fn log, void* user);

enum {
  WFBM_CHECK_PASS = 0,
  WFBM_CHECK_FAIL = 1,
  WFBM_CHECK_SKIPPED = 2
};

typedef struct {
  int32_t n;
  double t;
  double cov_abs_error;
  double mean;
  double variance;
  double std_error;
  double ks;
  int32_t increment_bound;     /* WFBM_CHECK_* */
  int32_t moment_defect;       /* WFBM_CHECK_* */
  int32_t series_vs_recursion; /* WFBM_CHECK_* */
} wfbm_study_row;

typedef struct {
  double hurst;
  const int32_t* n_list;
  size_t n_count;
  wfbm_scheme_spec scheme;
  const double* times;
  size_t time_count;
  uint64_t paths;
  uint64_t seed;
  double tol;
  const char* cache_dir; /* may be NULL */
  int32_t max_inequality_order;
  int32_t threads; /* 0: hardware concurrency */
} wfbm_study_config;

void wfbm_study_config_init(wfbm_study_config* cfg);

typedef void (*wfbm_study_row_fn)(const wfbm_study_row* row, void* user);
/* One row per (n, t); rows are emitted in order and deterministically for a
 * fixed config. */
wfbm_status wfbm_study_converge(const wfbm_study_config* cfg, wfbm_study_row_fn fn,
                                void* user);

typedef struct {
  int32_t n;
  double t;
  double diff_norm2; /* exact E | series - recursion |^2 */
  double bound;      /* certificate constant times n^{1-2H} */
  double slope;      /* fitted log-log slope, same value on every row */
} wfbm_rate_row;

typedef void (*wfbm_rate_row_fn)(const wfbm_rate_row* row, void* user);
wfbm_status wfbm_study_rate(const wfbm_study_config* cfg, wfbm_rate_row_fn fn,
                            void* user);

#ifdef __cplusplus
}
#endif

#endif /* WICKFBM_H */
