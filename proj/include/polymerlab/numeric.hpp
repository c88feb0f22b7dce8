#pragma once
// Small numeric toolbox shared across the library: simple-random-walk
// kernels, quadrature, empirical distances, least squares, hashing.

#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace polymerlab {

// log(n!) with an internally grown table. Call reserve() once before
// entering parallel regions; lookups are then lock-free reads.
class LogFactorial {
 public:
  static void reserve(int64_t n);
  static double value(int64_t n);
};

// P(S_n = x) for the 1-d simple random walk (exact binomial mass; 0 when the
// parity of n and x disagree or |x| > n).
double srw_kernel_1d(int64_t n, int64_t x);

// P(S_n = x) for d in {1,2}. d=2 uses the diagonal factorization of the
// planar walk into two independent 1-d walks.
double srw_kernel(int64_t n, const int32_t* x, int d);

// P(S_n = x) for any d by direct layer convolution; intended for small n
// (serves as the oracle for the closed forms above).
double srw_kernel_dp(int64_t n, const int32_t* x, int d);

// 1-d walk confined to the centered box |y| <= radius (absorbing outside).
// Exact on the lattice via the reflection/image expansion.
double srw_box_kernel_1d(int64_t n, int64_t x0, int64_t x1, int64_t radius);
// P(walk started at x0 stays in the box for n more steps).
double srw_box_survival_1d(int64_t n, int64_t x0, int64_t radius);

// Tanh-sinh (double-exponential) quadrature on a finite interval; handles
// integrable endpoint singularities. Levels double until the relative
// change is below rel_tol or max_level is hit.
double integrate_finite(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-12, int max_level = 12);

// Integral over (a, +inf) via x = a + u/(1-u).
double integrate_semi_inf(const std::function<double(double)>& f, double a,
                          double rel_tol = 1e-12, int max_level = 12);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Standard Gaussian upper tail P(Z > x).
double gaussian_upper_tail(double x);

// Two-sample Kolmogorov-Smirnov statistic (right-continuous empirical CDFs).
double ks_statistic(std::vector<double> a, std::vector<double> b);

// 1-Wasserstein distance between empirical measures (any sample sizes).
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Least-squares line fit; returns {slope, intercept}.
std::pair<double, double> fit_line(const std::vector<double>& xs,
                                   const std::vector<double>& ys);

// Mean with jackknife (leave-one-out) standard error.
std::pair<double, double> jackknife_mean(const std::vector<double>& v);

// A Monte-Carlo estimate with its standard error.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// FNV-1a 64-bit hash of a byte string.
uint64_t fnv1a64(std::string_view bytes);

}  // namespace polymerlab
