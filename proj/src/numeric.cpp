#include "polymerlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace polymerlab {

namespace {
std::vector<double> g_logfact = {0.0, 0.0};  // log 0!, log 1!
}

void LogFactorial::reserve(int64_t n) {
  if (n < static_cast<int64_t>(g_logfact.size())) return;
  size_t old = g_logfact.size();
  g_logfact.resize(static_cast<size_t>(n) + 1);
  for (size_t k = old; k < g_logfact.size(); ++k)
    g_logfact[k] = g_logfact[k - 1] + std::log(static_cast<double>(k));
}

double LogFactorial::value(int64_t n) {
  if (n < 0) throw std::invalid_argument("LogFactorial: negative n");
  if (n >= static_cast<int64_t>(g_logfact.size())) reserve(n);
  return g_logfact[static_cast<size_t>(n)];
}

double srw_kernel_1d(int64_t n, int64_t x) {
  if (n == 0) return x == 0 ? 1.0 : 0.0;
  if (std::llabs(x) > n || ((n + x) & 1)) return 0.0;
  int64_t k = (n + x) / 2;
  double logp = LogFactorial::value(n) - LogFactorial::value(k) -
                LogFactorial::value(n - k) -
                static_cast<double>(n) * std::numbers::ln2;
  return std::exp(logp);
}

double srw_kernel(int64_t n, const int32_t* x, int d) {
  if (d == 1) return srw_kernel_1d(n, x[0]);
  if (d == 2) {
    // Rotate by 45 degrees: (x1+x2, x1-x2) are two independent 1-d walks.
    return srw_kernel_1d(n, static_cast<int64_t>(x[0]) + x[1]) *
           srw_kernel_1d(n, static_cast<int64_t>(x[0]) - x[1]);
  }
  return srw_kernel_dp(n, x, d);
}

double srw_kernel_dp(int64_t n, const int32_t* x, int d) {
  if (d < 1) throw std::invalid_argument("srw_kernel_dp: d must be >= 1");
  for (int j = 0; j < d; ++j)
    if (std::llabs(x[j]) > n) return 0.0;
  int64_t width = 2 * n + 1;
  int64_t cells = 1;
  for (int j = 0; j < d; ++j) {
    cells *= width;
    if (cells > (int64_t{1} << 28))
      throw std::length_error("srw_kernel_dp: lattice too large");
  }
  std::vector<double> cur(static_cast<size_t>(cells), 0.0), next(cur);
  // Index layout: site s -> sum_j (x_j + n) * width^j.
  std::vector<int64_t> stride(static_cast<size_t>(d), 1);
  for (int j = 1; j < d; ++j) stride[j] = stride[j - 1] * width;
  int64_t origin = 0;
  for (int j = 0; j < d; ++j) origin += n * stride[j];
  cur[static_cast<size_t>(origin)] = 1.0;
  double step = 1.0 / (2.0 * d);
  std::vector<int64_t> coord(static_cast<size_t>(d));
  for (int64_t m = 0; m < n; ++m) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int64_t s = 0; s < cells; ++s) {
      double v = cur[static_cast<size_t>(s)];
      if (v == 0.0) continue;
      int64_t rem = s;
      for (int j = 0; j < d; ++j) {
        coord[j] = rem % width - n;
        rem /= width;
      }
      for (int j = 0; j < d; ++j) {
        if (coord[j] + 1 <= n) next[static_cast<size_t>(s + stride[j])] += v * step;
        if (coord[j] - 1 >= -n) next[static_cast<size_t>(s - stride[j])] += v * step;
      }
    }
    cur.swap(next);
  }
  int64_t target = 0;
  for (int j = 0; j < d; ++j) target += (x[j] + n) * stride[j];
  return cur[static_cast<size_t>(target)];
}

double srw_box_kernel_1d(int64_t n, int64_t x0, int64_t x1, int64_t radius) {
  if (std::llabs(x0) > radius || std::llabs(x1) > radius) return 0.0;
  int64_t B = radius + 1;  // absorbing sites at +-B
  double total = 0.0;
  int64_t period = 4 * B;
  int64_t kmax = (n + std::llabs(x1 - x0)) / period + 1;
  for (int64_t k = -kmax; k <= kmax; ++k) {
    total += srw_kernel_1d(n, x1 - x0 + period * k);
    total -= srw_kernel_1d(n, x1 + x0 + 2 * B + period * k);
  }
  return std::max(total, 0.0);
}

double srw_box_survival_1d(int64_t n, int64_t x0, int64_t radius) {
  if (std::llabs(x0) > radius) return 0.0;
  if (n == 0) return 1.0;
  double total = 0.0;
  // Only sites with the right parity carry mass; sum the absorbing kernel.
  int64_t lo = -radius, hi = radius;
  for (int64_t y = lo; y <= hi; ++y) {
    if (((n + y - x0) & 1) == 0) total += srw_box_kernel_1d(n, x0, y, radius);
  }
  return std::min(total, 1.0);
}

namespace {
// Abscissas/weights of the tanh-sinh rule at a given level, on (-1,1).
void tanh_sinh_points(int level, std::vector<double>& xs,
                      std::vector<double>& ws, bool midpoints_only) {
  double h = 1.0 / static_cast<double>(int64_t{1} << level);
  double tmax = 3.8;
  xs.clear();
  ws.clear();
  int64_t kmax = static_cast<int64_t>(tmax / h);
  for (int64_t k = -kmax; k <= kmax; ++k) {
    if (midpoints_only && (k % 2 == 0)) continue;
    double t = static_cast<double>(k) * h;
    double u = std::numbers::pi / 2.0 * std::sinh(t);
    double x = std::tanh(u);
    double w = std::numbers::pi / 2.0 * std::cosh(t) / std::pow(std::cosh(u), 2);
    if (1.0 - std::abs(x) < 1e-17 || w < 1e-300) continue;
    xs.push_back(x);
    ws.push_back(w);
  }
}
}  // namespace

double integrate_finite(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_level) {
  if (!(b > a)) return 0.0;
  double c = 0.5 * (a + b), s = 0.5 * (b - a);
  std::vector<double> xs, ws;
  double sum = 0.0, prev = 0.0;
  double h = 1.0;
  for (int level = 0; level <= max_level; ++level) {
    tanh_sinh_points(level, xs, ws, level > 0);
    double add = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      double x = c + s * xs[i];
      if (x <= a || x >= b) continue;
      double v = f(x);
      if (std::isfinite(v)) add += ws[i] * v;
    }
    if (level == 0) {
      sum = add * h;
    } else {
      h *= 0.5;
      sum = 0.5 * sum + add * h;
    }
    if (level >= 2) {
      double denom = std::max(std::abs(sum), 1e-300);
      if (std::abs(sum - prev) <= rel_tol * denom) return sum * s;
    }
    prev = sum;
  }
  return sum * s;
}

double integrate_semi_inf(const std::function<double(double)>& f, double a,
                          double rel_tol, int max_level) {
  auto g = [&](double u) {
    double om = 1.0 - u;
    double x = a + u / om;
    return f(x) / (om * om);
  };
  return integrate_finite(g, 0.0, 1.0, rel_tol, max_level);
}

const GaussLegendre& gauss_legendre(int order) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  GaussLegendre gl;
  gl.nodes.resize(static_cast<size_t>(order));
  gl.weights.resize(static_cast<size_t>(order));
  int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[static_cast<size_t>(i)] = -x;
    gl.nodes[static_cast<size_t>(order - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[static_cast<size_t>(i)] = w;
    gl.weights[static_cast<size_t>(order - 1 - i)] = w;
  }
  auto [pos, inserted] = cache.emplace(order, std::move(gl));
  (void)inserted;
  return pos->second;
}

double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() || j < b.size()) {
    double t = (i < a.size() && (j >= b.size() || a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  grid.insert(grid.end(), a.begin(), a.end());
  grid.insert(grid.end(), b.begin(), b.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double total = 0.0;
  size_t i = 0, j = 0;
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  for (size_t g = 0; g + 1 < grid.size(); ++g) {
    while (i < a.size() && a[i] <= grid[g]) ++i;
    while (j < b.size() && b[j] <= grid[g]) ++j;
    double fa = static_cast<double>(i) / na, fb = static_cast<double>(j) / nb;
    total += std::abs(fa - fb) * (grid[g + 1] - grid[g]);
  }
  return total;
}

std::pair<double, double> fit_line(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matched points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

std::pair<double, double> jackknife_mean(const std::vector<double>& v) {
  size_t n = v.size();
  if (n < 2) throw std::invalid_argument("jackknife_mean: need >= 2 values");
  double sum = 0.0;
  for (double x : v) sum += x;
  double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) {
    double loo = (sum - x) / static_cast<double>(n - 1);
    ss += (loo - mean) * (loo - mean);
  }
  double se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, se};
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace polymerlab
