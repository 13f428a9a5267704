#include "kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "quadrature.hpp"

namespace wickfbm {

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h > 0.5) || !(h < 1.0)) {
    throw std::invalid_argument("HurstParam: H must lie strictly inside (1/2, 1), got " +
                                std::to_string(h));
  }
}

double molchan_golosov_constant(HurstParam H) {
  const double h = H.value();
  return std::sqrt(2.0 * h * std::tgamma(1.5 - h) /
                   (std::tgamma(h + 0.5) * std::tgamma(2.0 - 2.0 * h)));
}

double fbm_covariance(HurstParam H, double t, double s) {
  const double e = 2.0 * H.value();
  return 0.5 * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) -
                std::pow(std::abs(t - s), e));
}

double kernel_z(HurstParam H, double t, double s, double rel_tol) {
  if (!(s > 0.0)) throw std::invalid_argument("kernel_z: s must be > 0");
  if (s > 1.0 || t < 0.0 || t > 1.0) {
    throw std::invalid_argument("kernel_z: (t, s) must lie in [0,1] x (0,1]");
  }
  if (t <= s) return 0.0;
  const double beta = H.beta();
  const double inv_beta = 1.0 / beta;
  const double upper = std::pow(t - s, beta);
  auto f = [s, beta, inv_beta](double v) {
    return std::pow(s + std::pow(v, inv_beta), beta);
  };
  QuadResult r = integrate_doubling(f, 0.0, upper, rel_tol, 1e-300, 16, 1 << 14);
  if (!r.converged) {
    throw QuadratureError("kernel_z: node doubling did not stabilize at t=" +
                          std::to_string(t) + ", s=" + std::to_string(s));
  }
  return molchan_golosov_constant(H) * std::pow(s, -beta) * r.value;
}

namespace {

// Builds one grid. Off-diagonal entries of column i (l > i) share outer nodes
// over the cell [(i-1)/n, i/n]; the inner v-integral is split at the lattice
// breakpoints v_m = (m/n - s)^beta and prefix-summed so that b[l][i] is
// nondecreasing in l by construction. The diagonal entry b[i][i] integrates
// in swapped order (v outer, s inner) because its outer integrand has a
// (t - s)^beta edge at s = t.
class GridBuilder {
 public:
  GridBuilder(HurstParam H, int n, double tol)
      : H_(H),
        n_(n),
        tol_(tol),
        beta_(H.beta()),
        inv_beta_(1.0 / H.beta()),
        gamma_(H.gamma()),
        scale_(std::sqrt(static_cast<double>(n)) * molchan_golosov_constant(H)) {}

  void run(std::vector<double>& b, QuadProfile& profile) {
    profile_ = &profile;
    b_ = &b;
    std::atomic<int> next{1};
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_));
    std::vector<std::thread> threads;
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    auto work = [&]() {
      try {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i > n_ || failed.load()) return;
          build_cell_group(i);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
      }
    };
    for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work);
    work();
    for (auto& th : threads) th.join();
    if (failed.load()) throw QuadratureError(error_message);
    profile.realized_outer = realized_outer_.load();
    profile.realized_inner = realized_inner_.load();
  }

 private:
  std::size_t offset(int l, int i) const {
    return static_cast<std::size_t>(l - 1) * l / 2 + (i - 1);
  }

  // Column i plus its diagonal entry. Cell 1 integrates entry by entry in
  // swapped order: its outer integrand carries an s^{k beta} expansion at
  // s = 0 that no power substitution removes, which stalls the shared-node
  // column scheme below tolerance for small beta.
  void build_cell_group(int i) {
    if (i == 1) {
      for (int l = 1; l <= n_; ++l) (*b_)[offset(l, 1)] = first_cell_entry(l);
      return;
    }
    (*b_)[offset(i, i)] = diagonal_entry(i);
    if (i == n_) return;

    std::vector<double> cur, fine;
    int m = profile_->outer_base;
    int q = profile_->inner_base;
    column_pass(i, m, q, cur);
    bool accepted = false;
    while (2 * m <= profile_->outer_max) {
      const int m2 = 2 * m;
      const int q2 = std::min(2 * q, 128);
      column_pass(i, m2, q2, fine);
      double worst = 0.0;
      for (std::size_t k = 0; k < fine.size(); ++k) {
        const double scale = std::max(std::abs(fine[k]), 1e-300);
        worst = std::max(worst, std::abs(fine[k] - cur[k]) / scale);
      }
      if (worst <= tol_) {
        bump(realized_outer_, m2);
        bump(realized_inner_, q2);
        accepted = true;
        cur.swap(fine);
        break;
      }
      cur.swap(fine);
      m = m2;
      q = q2;
    }
    if (!accepted) {
      throw QuadratureError("grid column " + std::to_string(i) +
                            " did not stabilize under node doubling (n=" +
                            std::to_string(n_) + ")");
    }
    for (int l = i + 1; l <= n_; ++l) {
      (*b_)[offset(l, i)] = cur[static_cast<std::size_t>(l - i - 1)];
    }
  }

  // One quadrature pass over column i >= 2: fills out[l-i-1] = b[l][i] for
  // l = i+1..n at the given node counts. Outer nodes are shared down the
  // column and the inner integral is prefix-summed over the lattice
  // breakpoints, so b[l][i] is nondecreasing in l within a pass.
  void column_pass(int i, int m_outer, int q_inner, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(n_ - i), 0.0);
    const double t_i = static_cast<double>(i) / n_;
    const GaussLegendreRule& rule = gauss_legendre(m_outer);

    for (int j = 0; j < m_outer; ++j) {
      const double a = static_cast<double>(i - 1) / n_;
      const double s = a + 0.5 / n_ * (1.0 + rule.nodes[j]);
      const double prefactor = 0.5 / n_ * rule.weights[j] * std::pow(s, -beta_);

      auto g = [this, s](double v) {
        return std::pow(s + std::pow(v, inv_beta_), beta_);
      };

      // Leading segment [0, (t_i - s)^beta] carries the v = 0 corner.
      double v_prev = std::pow(t_i - s, beta_);
      QuadResult head = integrate_doubling(g, 0.0, v_prev, 5e-13, 1e-300, 16, 4096);
      if (!head.converged) {
        throw QuadratureError("inner head segment did not stabilize in column " +
                              std::to_string(i));
      }
      double walk = head.value;
      for (int l = i + 1; l <= n_; ++l) {
        const double v_l = std::pow(static_cast<double>(l) / n_ - s, beta_);
        walk += integrate_gl(g, v_prev, v_l, q_inner);
        out[static_cast<std::size_t>(l - i - 1)] += prefactor * walk;
        v_prev = v_l;
      }
    }
    for (double& x : out) x *= scale_;
  }

  // b[l][1] via the swapped integration order
  //   b[l][1] = sqrt(n) c_H / gamma int_0^{(t_l)^beta}
  //             int_0^{min(1/n, t_l - v^{1/beta})^gamma}
  //             (psi^{1/gamma} + v^{1/beta})^beta dpsi dv,
  // split at v* = (t_l - 1/n)^beta where the psi-limit stops saturating.
  double first_cell_entry(int l) const {
    const double t = static_cast<double>(l) / n_;
    const double cell = 1.0 / n_;
    const double inner_tol = std::min(1e-12, 0.01 * tol_);

    auto outer = [&](double v) {
      const double r = std::pow(v, inv_beta_);
      const double s_hi = std::min(cell, t - r);
      const double psi_hi = std::pow(s_hi, gamma_);
      auto f = [&](double psi) {
        return std::pow(std::pow(psi, 1.0 / gamma_) + r, beta_);
      };
      QuadResult qr = integrate_doubling(f, 0.0, psi_hi, inner_tol, 1e-300, 8, 2048);
      return qr.value / gamma_;
    };

    const double v_star = l >= 2 ? std::pow(t - cell, beta_) : 0.0;
    const double v_max = std::pow(t, beta_);
    double total = 0.0;
    for (auto [lo, hi] : {std::pair{0.0, v_star}, std::pair{v_star, v_max}}) {
      if (!(hi > lo)) continue;
      QuadResult qr = integrate_doubling(outer, lo, hi, 0.5 * tol_, 1e-300, 16, 8192);
      if (!qr.converged) {
        throw QuadratureError("first-cell entry l=" + std::to_string(l) +
                              " did not stabilize under node doubling (n=" +
                              std::to_string(n_) + ")");
      }
      bump(realized_outer_, qr.nodes);
      total += qr.value;
    }
    return scale_ * total;
  }

  // b[i][i] for i >= 2 via swapped integration order:
  //   b[i][i] = sqrt(n) c_H int_0^{(1/n)^beta} int_{(i-1)/n}^{i/n - v^{1/beta}}
  //             s^{-beta} (s + v^{1/beta})^beta ds dv.
  double diagonal_entry(int i) const {
    const double t = static_cast<double>(i) / n_;
    const double s0 = static_cast<double>(i - 1) / n_;
    const double v_max = std::pow(1.0 / n_, beta_);
    const double inner_tol = std::min(1e-12, 0.01 * tol_);

    auto outer = [&](double v) {
      const double r = std::pow(v, inv_beta_);
      const double s_hi = t - r;
      auto f = [&](double s) { return std::pow(s, -beta_) * std::pow(s + r, beta_); };
      QuadResult qr = integrate_doubling(f, s0, s_hi, inner_tol, 1e-300, 8, 1024);
      return qr.value;
    };

    double prev = integrate_gl(outer, 0.0, v_max, 16);
    for (int m = 32; m <= 8192; m *= 2) {
      const double cur = integrate_gl(outer, 0.0, v_max, m);
      const double scale = std::max(std::abs(cur), 1e-300);
      if (std::abs(cur - prev) <= tol_ * scale) {
        bump(realized_outer_, m);
        return scale_ * cur;
      }
      prev = cur;
    }
    throw QuadratureError("diagonal cell " + std::to_string(i) +
                          " did not stabilize under node doubling (n=" +
                          std::to_string(n_) + ")");
  }

  static void bump(std::atomic<int>& slot, int v) {
    int cur = slot.load();
    while (cur < v && !slot.compare_exchange_weak(cur, v)) {
    }
  }

  HurstParam H_;
  int n_;
  double tol_;
  double beta_, inv_beta_, gamma_, scale_;
  QuadProfile* profile_ = nullptr;
  std::vector<double>* b_ = nullptr;
  mutable std::atomic<int> realized_outer_{0};
  mutable std::atomic<int> realized_inner_{0};
};

}  // namespace

KernelGrid::KernelGrid(HurstParam H, int n, QuadProfile profile)
    : H_(H), n_(n), profile_(profile) {
  const std::size_t entries = static_cast<std::size_t>(n) * (n + 1) / 2;
  b_.assign(entries, 0.0);
  d_.assign(entries, 0.0);
}

KernelGrid KernelGrid::build(HurstParam H, int n, double tol) {
  if (n < 1) throw std::invalid_argument("KernelGrid::build: n must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("KernelGrid::build: tol must be > 0");
  QuadProfile profile;
  profile.tol = tol;
  KernelGrid grid(H, n, profile);
  GridBuilder builder(H, n, tol);
  builder.run(grid.b_, grid.profile_);
  grid.finalize_increments();
  grid.validate();
  return grid;
}

void KernelGrid::finalize_increments() {
  for (int l = 1; l <= n_; ++l) {
    for (int i = 1; i <= l; ++i) {
      const double prev = (i <= l - 1) ? b_[offset(l - 1, i)] : 0.0;
      d_[offset(l, i)] = b_[offset(l, i)] - prev;
    }
  }
}

double KernelGrid::b(int l, int i) const {
  if (i < 1 || i > n_ || l < 0 || l > n_) {
    throw std::out_of_range("KernelGrid::b: index out of range");
  }
  if (l == 0 || i > l) return 0.0;
  return b_[offset(l, i)];
}

double KernelGrid::d(int l, int i) const {
  if (i < 1 || i > n_ || l < 1 || l > n_) {
    throw std::out_of_range("KernelGrid::d: index out of range");
  }
  if (i > l) return 0.0;
  return d_[offset(l, i)];
}

int KernelGrid::lattice_index(double t) const {
  if (t < 0.0 || t > 1.0) {
    throw std::invalid_argument("lattice_index: t must lie in [0, 1]");
  }
  const double x = static_cast<double>(n_) * t;
  int l = static_cast<int>(std::floor(x));
  if (l < n_ && x - l > 1.0 - 1e-9) ++l;  // snap values a hair below a lattice point
  return std::min(l, n_);
}

double KernelGrid::covariance(double t, double s) const {
  const int lt = lattice_index(t);
  const int ls = lattice_index(s);
  const int m = std::min(lt, ls);
  double sum = 0.0;
  for (int i = 1; i <= m; ++i) sum += b_[offset(lt, i)] * b_[offset(ls, i)];
  return sum;
}

double KernelGrid::row_norm2(int l) const {
  if (l < 0 || l > n_) throw std::out_of_range("row_norm2: l out of range");
  double sum = 0.0;
  for (int i = 1; i <= l; ++i) {
    const double v = b_[offset(l, i)];
    sum += v * v;
  }
  return sum;
}

void KernelGrid::validate() const {
  const double h = H_.value();
  const double bound = 2.0 * molchan_golosov_constant(H_) * std::pow(n_, h - 1.0);
  const double tol = profile_.tol;
  const double bound_slack = bound * (10.0 * tol) + 1e-14;
  for (int l = 1; l <= n_; ++l) {
    for (int i = 1; i <= l; ++i) {
      const double bv = b_[offset(l, i)];
      const double dv = d_[offset(l, i)];
      if (!std::isfinite(bv) || !std::isfinite(dv)) {
        throw std::runtime_error("KernelGrid: non-finite coefficient");
      }
      if (bv < 0.0) throw std::runtime_error("KernelGrid: negative coefficient b");
      if (dv < -(10.0 * tol * bv + 1e-14)) {
        throw std::runtime_error("KernelGrid: negative increment d at l=" +
                                 std::to_string(l) + ", i=" + std::to_string(i));
      }
      if (bv > bound + bound_slack) {
        throw std::runtime_error("KernelGrid: coefficient bound 2 c_H n^{H-1} violated at l=" +
                                 std::to_string(l) + ", i=" + std::to_string(i));
      }
    }
  }
  // Row norms against (l/n)^{2H} and adjacent increments against n^{-2H}.
  for (int l = 1; l <= n_; ++l) {
    const double lhs = row_norm2(l);
    const double rhs = std::pow(static_cast<double>(l) / n_, 2.0 * h);
    if (lhs > rhs * (1.0 + 100.0 * tol) + 1e-12) {
      throw std::runtime_error("KernelGrid: row norm bound violated at l=" + std::to_string(l));
    }
    double inc = 0.0;
    for (int i = 1; i <= l; ++i) {
      const double dv = d_[offset(l, i)];
      inc += dv * dv;
    }
    if (inc > std::pow(static_cast<double>(n_), -2.0 * h) * (1.0 + 100.0 * tol) + 1e-12) {
      throw std::runtime_error("KernelGrid: increment norm bound violated at l=" +
                               std::to_string(l));
    }
  }
}

namespace {

constexpr char kGridMagic[8] = {'W', 'F', 'B', 'M', 'G', 'R', 'D', '1'};
constexpr std::uint32_t kGridVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void KernelGrid::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("KernelGrid::save: cannot open " + path);
  os.write(kGridMagic, sizeof(kGridMagic));
  write_pod(os, kGridVersion);
  write_pod(os, std::uint32_t{0});
  write_pod(os, H_.value());
  write_pod(os, static_cast<std::uint64_t>(n_));
  write_pod(os, profile_.tol);
  write_pod(os, static_cast<std::uint32_t>(profile_.outer_base));
  write_pod(os, static_cast<std::uint32_t>(profile_.inner_base));
  write_pod(os, static_cast<std::uint32_t>(profile_.outer_max));
  write_pod(os, static_cast<std::uint32_t>(profile_.realized_outer));
  write_pod(os, static_cast<std::uint32_t>(profile_.realized_inner));
  write_pod(os, std::uint32_t{0});
  os.write(reinterpret_cast<const char*>(b_.data()),
           static_cast<std::streamsize>(b_.size() * sizeof(double)));
  if (!os) throw std::runtime_error("KernelGrid::save: write failed for " + path);
}

KernelGrid KernelGrid::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("KernelGrid::load: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kGridMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("KernelGrid::load: bad magic in " + path);
  }
  std::uint32_t version = 0, flags = 0;
  read_pod(is, version);
  read_pod(is, flags);
  if (version != kGridVersion) {
    throw std::runtime_error("KernelGrid::load: unsupported version in " + path);
  }
  double h = 0.0, tol = 0.0;
  std::uint64_t n = 0;
  read_pod(is, h);
  read_pod(is, n);
  read_pod(is, tol);
  std::uint32_t outer_base = 0, inner_base = 0, outer_max = 0;
  std::uint32_t realized_outer = 0, realized_inner = 0, pad = 0;
  read_pod(is, outer_base);
  read_pod(is, inner_base);
  read_pod(is, outer_max);
  read_pod(is, realized_outer);
  read_pod(is, realized_inner);
  read_pod(is, pad);
  if (!is || n < 1 || n > (1u << 20)) {
    throw std::runtime_error("KernelGrid::load: corrupt header in " + path);
  }
  QuadProfile profile;
  profile.tol = tol;
  profile.outer_base = static_cast<int>(outer_base);
  profile.inner_base = static_cast<int>(inner_base);
  profile.outer_max = static_cast<int>(outer_max);
  profile.realized_outer = static_cast<int>(realized_outer);
  profile.realized_inner = static_cast<int>(realized_inner);
  KernelGrid grid(HurstParam(h), static_cast<int>(n), profile);
  is.read(reinterpret_cast<char*>(grid.b_.data()),
          static_cast<std::streamsize>(grid.b_.size() * sizeof(double)));
  if (!is) throw std::runtime_error("KernelGrid::load: truncated data in " + path);
  grid.finalize_increments();
  grid.validate();
  return grid;
}

KernelGrid KernelGrid::load_or_build(HurstParam H, int n, double tol,
                                     const std::string& cache_dir) {
  if (cache_dir.empty()) return build(H, n, tol);
  char name[128];
  std::snprintf(name, sizeof(name), "grid-H%.17g-n%d-tol%.17g.bin", H.value(), n, tol);
  std::filesystem::create_directories(cache_dir);
  const std::string path = (std::filesystem::path(cache_dir) / name).string();
  if (std::filesystem::exists(path)) {
    KernelGrid grid = load(path);
    if (grid.steps() == n && grid.hurst().value() == H.value() && grid.tol() == tol) {
      return grid;
    }
  }
  KernelGrid grid = build(H, n, tol);
  grid.save(path);
  return grid;
}

}  // namespace wickfbm
