#include "polymerlab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polymerlab/lattice_partition.hpp"
#include "polymerlab/numeric.hpp"

namespace polymerlab {

namespace {

class FreeKernels : public ChainKernels {
 public:
  FreeKernels(int64_t N, int d) : N_(N), d_(d) {}
  double empty() const override { return 1.0; }
  double source(const LatticeSite& s) const override {
    return walk_kernel(s.n, s.x, d_);
  }
  double step(const LatticeSite& a, const LatticeSite& b) const override {
    int32_t dx[kMaxDim];
    for (int j = 0; j < d_; ++j) dx[j] = static_cast<int32_t>(b.x[j] - a.x[j]);
    return walk_kernel(b.n - a.n, dx, d_);
  }
  double tail(const LatticeSite&) const override { return 1.0; }

 private:
  int64_t N_;
  int d_;
};

// 1-d kernels killed outside |y| <= R, via the reflection-image expansion.
class ImageBoxKernels : public ChainKernels {
 public:
  ImageBoxKernels(int64_t N, int64_t R) : N_(N), R_(R) {}
  double empty() const override { return srw_box_survival_1d(N_, 0, R_); }
  double source(const LatticeSite& s) const override {
    return srw_box_kernel_1d(s.n, 0, s.x[0], R_);
  }
  double step(const LatticeSite& a, const LatticeSite& b) const override {
    return srw_box_kernel_1d(b.n - a.n, a.x[0], b.x[0], R_);
  }
  double tail(const LatticeSite& s) const override {
    return srw_box_survival_1d(N_ - s.n, s.x[0], R_);
  }

 private:
  int64_t N_;
  int64_t R_;
};

// Killed kernels by dense sweeps over the box [-R,R]^d (any d; oracle for
// the image expansion, and the d=2 cutoff provider).
class DpBoxKernels : public ChainKernels {
 public:
  DpBoxKernels(int64_t N, int d, int64_t R) : N_(N), d_(d), R_(R) {
    double cells = 1.0;
    for (int j = 0; j < d; ++j) cells *= static_cast<double>(2 * R + 1);
    if (cells > 2e6)
      throw std::length_error(
          "chain kernels: DP box too large; use the closed-form provider or "
          "shrink the cutoff");
  }
  double empty() const override {
    int32_t origin[kMaxDim] = {0, 0, 0, 0};
    return survival(origin, N_);
  }
  double source(const LatticeSite& s) const override {
    int32_t origin[kMaxDim] = {0, 0, 0, 0};
    return kernel(origin, s.x, s.n);
  }
  double step(const LatticeSite& a, const LatticeSite& b) const override {
    return kernel(a.x, b.x, b.n - a.n);
  }
  double tail(const LatticeSite& s) const override {
    return survival(s.x, N_ - s.n);
  }

 private:
  size_t cells() const {
    size_t c = 1;
    for (int j = 0; j < d_; ++j) c *= static_cast<size_t>(2 * R_ + 1);
    return c;
  }
  size_t idx(const int32_t* y) const {
    size_t v = 0, stride = 1;
    for (int j = 0; j < d_; ++j) {
      v += static_cast<size_t>(y[j] + R_) * stride;
      stride *= static_cast<size_t>(2 * R_ + 1);
    }
    return v;
  }
  bool inside(const int32_t* y) const {
    for (int j = 0; j < d_; ++j)
      if (y[j] < -R_ || y[j] > R_) return false;
    return true;
  }
  std::vector<double> sweep(const int32_t* x0, int64_t steps) const {
    std::vector<double> cur(cells(), 0.0), nxt;
    if (!inside(x0)) return cur;
    cur[idx(x0)] = 1.0;
    const double step_prob = 1.0 / (2.0 * d_);
    for (int64_t n = 0; n < steps; ++n) {
      nxt.assign(cells(), 0.0);
      // Push mass from every live cell to its in-box neighbors.
      int32_t y[kMaxDim] = {0, 0, 0, 0};
      for (int j = 0; j < d_; ++j) y[j] = static_cast<int32_t>(-R_);
      for (;;) {
        double u = cur[idx(y)];
        if (u != 0.0) {
          int32_t z[kMaxDim];
          for (int j = 0; j < d_; ++j) z[j] = y[j];
          for (int j = 0; j < d_; ++j) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
              z[j] = static_cast<int32_t>(y[j] + sgn);
              if (z[j] >= -R_ && z[j] <= R_) nxt[idx(z)] += u * step_prob;
            }
            z[j] = y[j];
          }
        }
        int j = d_ - 1;
        while (j >= 0 && y[j] == R_) {
          y[j] = static_cast<int32_t>(-R_);
          --j;
        }
        if (j < 0) break;
        ++y[j];
      }
      cur.swap(nxt);
    }
    return cur;
  }
  double kernel(const int32_t* x0, const int32_t* x1, int64_t steps) const {
    if (steps < 0) return 0.0;
    std::vector<double> u = sweep(x0, steps);
    return inside(x1) ? u[idx(x1)] : 0.0;
  }
  double survival(const int32_t* x0, int64_t steps) const {
    std::vector<double> u = sweep(x0, steps);
    return std::accumulate(u.begin(), u.end(), 0.0);
  }

  int64_t N_;
  int d_;
  int64_t R_;
};

void sort_sites(std::vector<LatticeSite>& sites, std::vector<double>& w) {
  std::vector<size_t> order(sites.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    if (sites[i].n != sites[j].n) return sites[i].n < sites[j].n;
    for (int k = 0; k < kMaxDim; ++k)
      if (sites[i].x[k] != sites[j].x[k]) return sites[i].x[k] < sites[j].x[k];
    return false;
  });
  std::vector<LatticeSite> s2(sites.size());
  std::vector<double> w2(w.size());
  for (size_t i = 0; i < order.size(); ++i) {
    s2[i] = sites[order[i]];
    w2[i] = w[order[i]];
  }
  sites.swap(s2);
  w.swap(w2);
}

}  // namespace

std::unique_ptr<ChainKernels> make_chain_kernels(const PathFunctional& f,
                                                 int64_t N, int d,
                                                 KernelMode mode) {
  if (f.kind() != PathFunctional::Kind::constant_one)
    throw std::invalid_argument(
        "chain kernels: implemented for f = 1 with an optional support "
        "cutoff; use the partition engines for cylinder or custom "
        "functionals");
  if (!f.has_cutoff()) {
    if (mode == KernelMode::dp)
      return std::make_unique<DpBoxKernels>(N, d, N);
    return std::make_unique<FreeKernels>(N, d);
  }
  int64_t R = PathFunctional::cutoff_lattice_radius(f.cutoff_A(), N, d);
  if (d == 1 && mode != KernelMode::dp)
    return std::make_unique<ImageBoxKernels>(N, R);
  if (mode == KernelMode::closed_form)
    throw std::invalid_argument(
        "chain kernels: closed-form killed kernels exist only in d = 1");
  return std::make_unique<DpBoxKernels>(N, d, R);
}

double chain_total(std::vector<LatticeSite> sites, std::vector<double> w,
                   const ChainKernels& kernels) {
  if (sites.size() != w.size())
    throw std::invalid_argument("chain_total: sites and weights mismatch");
  sort_sites(sites, w);
  size_t M = sites.size();
  std::vector<double> g(M, 0.0);
  double total = kernels.empty();
  for (size_t j = 0; j < M; ++j) {
    double acc = kernels.source(sites[j]);
    for (size_t i = 0; i < j; ++i) {
      if (sites[i].n >= sites[j].n) continue;
      if (g[i] == 0.0) continue;
      acc += g[i] * kernels.step(sites[i], sites[j]);
    }
    g[j] = w[j] * acc;
    if (g[j] != 0.0) total += g[j] * kernels.tail(sites[j]);
  }
  return total;
}

double chain_total_subsets(std::vector<LatticeSite> sites,
                           std::vector<double> w,
                           const ChainKernels& kernels) {
  if (sites.size() != w.size())
    throw std::invalid_argument("chain_total: sites and weights mismatch");
  if (sites.size() > 25)
    throw std::length_error(
        "chain_total_subsets: 2^M enumeration capped at M = 25");
  sort_sites(sites, w);
  size_t M = sites.size();
  double total = kernels.empty();
  for (uint32_t mask = 1; mask < (uint32_t{1} << M); ++mask) {
    double term = 0.0;
    bool valid = true;
    int prev = -1;
    for (size_t j = 0; j < M && valid; ++j) {
      if (!(mask & (uint32_t{1} << j))) continue;
      if (prev < 0) {
        term = w[j] * kernels.source(sites[j]);
      } else {
        if (sites[static_cast<size_t>(prev)].n >= sites[j].n) {
          valid = false;  // equal times: not a chain
          break;
        }
        term *= w[j] * kernels.step(sites[static_cast<size_t>(prev)], sites[j]);
      }
      prev = static_cast<int>(j);
    }
    if (valid && prev >= 0)
      total += term * kernels.tail(sites[static_cast<size_t>(prev)]);
  }
  return total;
}

std::vector<LatticeSite> band_sites(const EnvSlab& env,
                                    const ScalingPlan& plan, double a,
                                    double b, int64_t radius) {
  if (!(a > 0.0))
    throw std::invalid_argument(
        "band: a = 0 would make the band the whole lattice");
  if (!(b > a)) throw std::invalid_argument("band: requires a < b");
  double lo = a * plan.V_N();
  double hi = b * plan.V_N();
  std::vector<LatticeSite> out =
      env.scan_exceedances(lo, radius < 0 ? env.N() : radius);
  if (std::isfinite(hi)) {
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](const LatticeSite& s) {
                               return 1.0 + s.eta >= hi;
                             }),
              out.end());
  }
  return out;
}

double chaos_expansion(const EnvSlab& env, const ScalingPlan& plan, double a,
                       double b, const PathFunctional& f, int64_t radius,
                       KernelMode mode) {
  std::vector<LatticeSite> band = band_sites(env, plan, a, b, radius);
  std::vector<double> w(band.size());
  for (size_t i = 0; i < band.size(); ++i) w[i] = plan.beta_N() * band[i].eta;
  auto kernels = make_chain_kernels(f, env.N(), env.d(), mode);
  return chain_total(std::move(band), std::move(w), *kernels);
}

SparsePartition sparse_partition(std::vector<LatticeSite> exceedances,
                                 const ScalingPlan& plan,
                                 const TruncationSpec& trunc,
                                 const PathFunctional& f, KernelMode mode) {
  if (trunc.is_identity())
    throw std::invalid_argument(
        "sparse partition: needs a truncation with a > 0 (the sparse form "
        "expands around the sub-threshold baseline)");
  double beta = plan.beta_N();
  double kappa = trunc.kappa_N_a;
  double base = 1.0 - beta * kappa;
  if (!(base > 0.0))
    throw std::runtime_error(
        "sparse partition: 1 - beta_N kappa_N <= 0 (numerical degeneracy)");
  double hi = trunc.b * trunc.V_N;
  auto kernels = make_chain_kernels(f, plan.N(), plan.d(), mode);

  std::vector<LatticeSite> band;
  std::vector<double> w_band, w_all(exceedances.size());
  for (size_t i = 0; i < exceedances.size(); ++i) {
    const LatticeSite& s = exceedances[i];
    bool in_band = !(std::isfinite(hi) && 1.0 + s.eta >= hi);
    double m = in_band ? (1.0 + beta * s.eta) / base : 1.0 / base;
    w_all[i] = m - 1.0;
    if (in_band) {
      band.push_back(s);
      w_band.push_back(beta * s.eta);
    }
  }
  SparsePartition out;
  out.zbar = chain_total(std::move(band), std::move(w_band), *kernels);
  double chains = chain_total(std::move(exceedances), std::move(w_all),
                              *kernels);
  out.z = std::pow(base, static_cast<double>(plan.N())) * chains;
  return out;
}

namespace {

RatioCheck finish_ratio(const SparsePartition& sp, const ScalingPlan& plan,
                        double a) {
  RatioCheck rc;
  rc.z = sp.z;
  rc.zbar = sp.zbar;
  rc.target = std::exp(-plan.beta_hat() * plan.kappa(a));
  if (sp.zbar == 0.0) {
    rc.degenerate = true;
    return rc;
  }
  rc.ratio = plan.gamma_factor() * sp.z / sp.zbar;
  return rc;
}

}  // namespace

RatioCheck ratio_check(const EnvSlab& env, const ScalingPlan& plan, double a,
                       double b, const PathFunctional& f, int64_t radius,
                       KernelMode mode) {
  if (!(a > 0.0)) throw std::invalid_argument("ratio_check: needs a > 0");
  TruncationSpec trunc = TruncationSpec::make(plan, a, b);
  std::vector<LatticeSite> exc = env.scan_exceedances(
      a * plan.V_N(), radius < 0 ? env.N() : radius);
  return finish_ratio(sparse_partition(std::move(exc), plan, trunc, f, mode),
                      plan, a);
}

RatioCheck ratio_check_sparse(std::vector<LatticeSite> exceedances,
                              const ScalingPlan& plan, double a, double b,
                              const PathFunctional& f, KernelMode mode) {
  if (!(a > 0.0)) throw std::invalid_argument("ratio_check: needs a > 0");
  TruncationSpec trunc = TruncationSpec::make(plan, a, b);
  return finish_ratio(
      sparse_partition(std::move(exceedances), plan, trunc, f, mode), plan,
      a);
}

}  // namespace polymerlab
