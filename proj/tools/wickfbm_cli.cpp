// Command-line frontend for the wickfbm shared library: grid construction,
// self tests, scheme simulation, and convergence/rate studies with CSV or
// JSON output. Talks to the library exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wickfbm.h"

namespace {

constexpr const char* kArtifact = "wickfbm";

int exit_code_for(wfbm_status status) {
  switch (status) {
    case WFBM_OK: return 0;
    case WFBM_ERR_CHECK_FAILED: return 2;
    case WFBM_ERR_QUADRATURE: return 3;
    case WFBM_ERR_CAPACITY: return 4;
    default: return 1;
  }
}

int fail_with(wfbm_status status, const std::string& context) {
  std::cerr << context << ": " << wfbm_last_error() << "\n";
  return exit_code_for(status);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* check_name(int32_t status) {
  switch (status) {
    case WFBM_CHECK_PASS: return "pass";
    case WFBM_CHECK_FAIL: return "fail";
    default: return "skipped";
  }
}

// Options shared by every subcommand; key names double as config-file keys.
struct Options {
  double hurst = 0.75;
  int32_t n = 64;
  std::vector<int32_t> n_list;
  std::string scheme = "geometric";
  double mu = 0.0, sigma = 1.0, s0 = 1.0;
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0, x0 = 1.0, y0 = 0.0;
  std::uint64_t paths = 10000;
  std::uint64_t seed = 1;
  std::vector<double> times;
  double tol = 1e-9;
  std::string out;
  std::string format = "csv";
};

void add_common_options(CLI::App* cmd, Options& opt) {
  cmd->set_config("--config", "", "key=value configuration file (flags override)");
  cmd->allow_config_extras(CLI::config_extras_mode::error);
  cmd->add_option("--hurst", opt.hurst, "Hurst parameter, strictly inside (0.5, 1)")
      ->check(CLI::Range(0.5, 1.0));
  cmd->add_option("--n", opt.n, "time steps on [0,1]")->check(CLI::PositiveNumber);
  cmd->add_option("--n_list", opt.n_list, "comma-separated list of step counts")
      ->delimiter(',');
  cmd->add_option("--scheme", opt.scheme,
                  "geometric | drift | linear_system | sin_cos | pathwise_sottinen");
  cmd->add_option("--mu", opt.mu, "drift coefficient");
  cmd->add_option("--sigma", opt.sigma, "volatility (drift scheme, > 0)");
  cmd->add_option("--s0", opt.s0, "initial value (drift scheme)");
  cmd->add_option("--a1", opt.a1, "linear system A1");
  cmd->add_option("--a2", opt.a2, "linear system A2");
  cmd->add_option("--b1", opt.b1, "linear system B1");
  cmd->add_option("--b2", opt.b2, "linear system B2");
  cmd->add_option("--x0", opt.x0, "linear system initial X");
  cmd->add_option("--y0", opt.y0, "linear system initial Y");
  cmd->add_option("--paths", opt.paths, "Monte Carlo path count");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--times", opt.times, "comma-separated evaluation times in [0,1]")
      ->delimiter(',');
  cmd->add_option("--tol", opt.tol, "grid quadrature tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "output path (default: stdout)");
  cmd->add_option("--format", opt.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
}

bool fill_scheme(const Options& opt, wfbm_scheme_spec* spec, std::string* error) {
  wfbm_scheme_spec_init(spec);
  if (opt.scheme == "geometric") {
    spec->variant = WFBM_SCHEME_GEOMETRIC;
  } else if (opt.scheme == "drift") {
    spec->variant = WFBM_SCHEME_DRIFT;
    spec->mu = opt.mu;
    spec->sigma = opt.sigma;
    spec->s0 = opt.s0;
    if (!(opt.sigma > 0.0)) {
      *error = "drift scheme requires sigma > 0";
      return false;
    }
  } else if (opt.scheme == "linear_system") {
    spec->variant = WFBM_SCHEME_LINEAR_SYSTEM;
    spec->a1 = opt.a1;
    spec->a2 = opt.a2;
    spec->b1 = opt.b1;
    spec->b2 = opt.b2;
    spec->x0 = opt.x0;
    spec->y0 = opt.y0;
  } else if (opt.scheme == "sin_cos") {
    spec->variant = WFBM_SCHEME_SIN_COS;
  } else if (opt.scheme == "pathwise_sottinen" || opt.scheme == "pathwise") {
    spec->variant = WFBM_SCHEME_PATHWISE;
  } else {
    *error = "unknown scheme '" + opt.scheme + "'";
    return false;
  }
  return true;
}

const char* cache_dir_from_env() {
  const char* dir = std::getenv("WICKFBM_CACHE_DIR");
  return dir != nullptr ? dir : "";
}

// Table writer: versioned header, '.' decimal, full round-trip precision so
// identical invocations produce byte-identical output.
class TableWriter {
 public:
  TableWriter(std::string schema, std::vector<std::string> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {}

  void add_row(std::vector<nlohmann::ordered_json> cells) { rows_.push_back(std::move(cells)); }

  int write(const std::string& out_path, const std::string& format) const {
    std::ostringstream body;
    if (format == "json") {
      nlohmann::ordered_json doc;
      doc["artifact"] = kArtifact;
      doc["version"] = wfbm_version();
      doc["schema"] = schema_;
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : rows_) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < columns_.size(); ++c) obj[columns_[c]] = row[c];
        doc["rows"].push_back(std::move(obj));
      }
      body << doc.dump(2) << "\n";
    } else {
      body << "# " << kArtifact << " " << wfbm_version() << " schema=" << schema_ << "\n";
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        body << columns_[c] << (c + 1 < columns_.size() ? "," : "\n");
      }
      for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          const auto& cell = row[c];
          if (cell.is_number_float()) {
            body << fmt17(cell.get<double>());
          } else if (cell.is_string()) {
            body << cell.get<std::string>();
          } else {
            body << cell.dump();
          }
          body << (c + 1 < row.size() ? "," : "\n");
        }
      }
    }
    if (out_path.empty()) {
      std::cout << body.str();
      return 0;
    }
    std::ofstream os(out_path, std::ios::trunc);
    if (!os) {
      std::cerr << "cannot open output file " << out_path << "\n";
      return 1;
    }
    os << body.str();
    return os ? 0 : 1;
  }

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

int cmd_grid(const Options& opt) {
  wfbm_grid* grid = nullptr;
  const wfbm_status st = wfbm_grid_build(opt.hurst, opt.n, opt.tol, &grid);
  if (st != WFBM_OK) return fail_with(st, "grid build failed");
  std::unique_ptr<wfbm_grid, decltype(&wfbm_grid_free)> guard(grid, &wfbm_grid_free);

  std::string path = opt.out;
  if (path.empty()) {
    char name[128];
    std::snprintf(name, sizeof(name), "grid-H%.17g-n%d-tol%.17g.bin", opt.hurst,
                  static_cast<int>(opt.n), opt.tol);
    path = name;
  }
  const wfbm_status save = wfbm_grid_save(grid, path.c_str());
  if (save != WFBM_OK) return fail_with(save, "grid save failed");

  double max_b = 0.0;
  for (int32_t l = 1; l <= opt.n; ++l) {
    for (int32_t i = 1; i <= l; ++i) {
      max_b = std::max(max_b, wfbm_grid_coefficient(grid, l, i));
    }
  }
  std::cout << "grid: H=" << fmt17(opt.hurst) << " n=" << opt.n << " tol=" << fmt17(opt.tol)
            << " max_coefficient=" << fmt17(max_b) << " file=" << path << "\n";
  return 0;
}

int cmd_selftest(const Options& opt) {
  const wfbm_status st = wfbm_selftest(
      opt.hurst, opt.seed,
      [](const char* line, void*) { std::cout << line << "\n"; }, nullptr);
  if (st == WFBM_OK) return 0;
  if (st == WFBM_ERR_CHECK_FAILED) {
    std::cerr << "selftest failed: " << wfbm_last_error() << "\n";
    return 2;
  }
  return fail_with(st, "selftest error");
}

int cmd_simulate(const Options& opt) {
  if (opt.paths == 0) {
    std::cerr << "simulate: paths must be >= 1\n";
    return 1;
  }
  if (opt.times.empty()) {
    std::cerr << "simulate: at least one evaluation time is required\n";
    return 1;
  }
  wfbm_scheme_spec spec;
  std::string error;
  if (!fill_scheme(opt, &spec, &error)) {
    std::cerr << "simulate: " << error << "\n";
    return 1;
  }
  wfbm_grid* grid = nullptr;
  wfbm_status st = wfbm_grid_load_or_build(opt.hurst, opt.n, opt.tol,
                                           cache_dir_from_env(), &grid);
  if (st != WFBM_OK) return fail_with(st, "grid build failed");
  std::unique_ptr<wfbm_grid, decltype(&wfbm_grid_free)> guard(grid, &wfbm_grid_free);

  const bool system = spec.variant == WFBM_SCHEME_LINEAR_SYSTEM ||
                      spec.variant == WFBM_SCHEME_SIN_COS;
  const std::size_t cells = static_cast<std::size_t>(opt.paths) * opt.times.size();
  std::vector<double> first(cells), second(system ? cells : 0);
  st = wfbm_simulate(grid, &spec, opt.times.data(), opt.times.size(), opt.paths,
                     opt.seed, first.data(), system ? second.data() : nullptr);
  if (st != WFBM_OK) return fail_with(st, "simulate failed");

  std::vector<std::string> cols = {"path", "time", "value"};
  if (system) cols.push_back("value2");
  TableWriter table("simulate-v1", cols);
  for (std::uint64_t p = 0; p < opt.paths; ++p) {
    for (std::size_t k = 0; k < opt.times.size(); ++k) {
      std::vector<nlohmann::ordered_json> row{static_cast<std::uint64_t>(p),
                                              opt.times[k],
                                              first[p * opt.times.size() + k]};
      if (system) row.push_back(second[p * opt.times.size() + k]);
      table.add_row(std::move(row));
    }
  }
  return table.write(opt.out, opt.format);
}

bool fill_study_config(const Options& opt, wfbm_study_config* cfg,
                       wfbm_scheme_spec* spec, std::string* error) {
  if (!fill_scheme(opt, spec, error)) return false;
  wfbm_study_config_init(cfg);
  cfg->hurst = opt.hurst;
  cfg->scheme = *spec;
  cfg->paths = opt.paths;
  cfg->seed = opt.seed;
  cfg->tol = opt.tol;
  cfg->cache_dir = nullptr;  // caller wires storage
  return true;
}

int cmd_converge(const Options& opt) {
  if (opt.n_list.empty()) {
    std::cerr << "converge: n_list is required\n";
    return 1;
  }
  if (opt.times.empty()) {
    std::cerr << "converge: at least one evaluation time is required\n";
    return 1;
  }
  wfbm_scheme_spec spec;
  wfbm_study_config cfg;
  std::string error;
  if (!fill_study_config(opt, &cfg, &spec, &error)) {
    std::cerr << "converge: " << error << "\n";
    return 1;
  }
  cfg.n_list = opt.n_list.data();
  cfg.n_count = opt.n_list.size();
  cfg.times = opt.times.data();
  cfg.time_count = opt.times.size();
  const std::string cache = cache_dir_from_env();
  cfg.cache_dir = cache.empty() ? nullptr : cache.c_str();

  TableWriter table("converge-v1",
                    {"n", "t", "cov_abs_error", "mean", "variance", "std_error", "ks",
                     "increment_bound", "moment_defect", "series_vs_recursion"});
  bool any_fail = false;
  struct Ctx {
    TableWriter* table;
    bool* any_fail;
  } ctx{&table, &any_fail};
  const wfbm_status st = wfbm_study_converge(
      &cfg,
      [](const wfbm_study_row* row, void* user) {
        auto* c = static_cast<Ctx*>(user);
        c->table->add_row({row->n, row->t, row->cov_abs_error, row->mean, row->variance,
                           row->std_error, row->ks, check_name(row->increment_bound),
                           check_name(row->moment_defect),
                           check_name(row->series_vs_recursion)});
        if (row->increment_bound == WFBM_CHECK_FAIL ||
            row->moment_defect == WFBM_CHECK_FAIL ||
            row->series_vs_recursion == WFBM_CHECK_FAIL) {
          *c->any_fail = true;
        }
      },
      &ctx);
  if (st != WFBM_OK) return fail_with(st, "converge failed");
  const int rc = table.write(opt.out, opt.format);
  if (rc != 0) return rc;
  return any_fail ? 2 : 0;
}

int cmd_rate(const Options& opt) {
  if (opt.n_list.empty()) {
    std::cerr << "rate: n_list is required\n";
    return 1;
  }
  wfbm_scheme_spec spec;
  wfbm_study_config cfg;
  std::string error;
  if (!fill_study_config(opt, &cfg, &spec, &error)) {
    std::cerr << "rate: " << error << "\n";
    return 1;
  }
  cfg.n_list = opt.n_list.data();
  cfg.n_count = opt.n_list.size();
  cfg.times = opt.times.empty() ? nullptr : opt.times.data();
  cfg.time_count = opt.times.size();
  const std::string cache = cache_dir_from_env();
  cfg.cache_dir = cache.empty() ? nullptr : cache.c_str();

  TableWriter table("rate-v1", {"n", "t", "diff_norm2", "bound", "slope"});
  const wfbm_status st = wfbm_study_rate(
      &cfg,
      [](const wfbm_rate_row* row, void* user) {
        static_cast<TableWriter*>(user)->add_row(
            {row->n, row->t, row->diff_norm2, row->bound, row->slope});
      },
      &table);
  if (st != WFBM_OK) return fail_with(st, "rate failed");
  return table.write(opt.out, opt.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disturbed binary random walks and discrete Wick difference schemes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("wickfbm ") + wfbm_version());

  // options live on the top-level app so a plain key=value config applies to
  // every subcommand; flags given after the subcommand fall through
  Options opt;
  add_common_options(&app, opt);
  CLI::App* grid = app.add_subcommand("grid", "build a kernel coefficient grid and save it");
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suites");
  CLI::App* simulate = app.add_subcommand("simulate", "per-path scheme values at given times");
  CLI::App* converge =
      app.add_subcommand("converge", "covariance/moment/KS study across step counts");
  CLI::App* rate = app.add_subcommand("rate", "series-vs-recursion rate study (exact)");
  for (CLI::App* cmd : {grid, selftest, simulate, converge, rate}) {
    cmd->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (grid->parsed()) return cmd_grid(opt);
  if (selftest->parsed()) return cmd_selftest(opt);
  if (simulate->parsed()) return cmd_simulate(opt);
  if (converge->parsed()) return cmd_converge(opt);
  if (rate->parsed()) return cmd_rate(opt);
  return 1;
}
