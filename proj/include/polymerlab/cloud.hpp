#pragma once
// Marked Poisson cloud and the continuum partition function.
//
// The disorder is a Poisson point process on [0,1] x [-L,L]^d x [a, inf)
// with intensity dt dx alpha v^{-(1+alpha)} dv.  The truncated partition
// function is the subset sum
//   Z(f) = e^{-bh kappa_a} sum_{sigma subset omega} bh^{|sigma|}
//          rho(t, x, f) prod v_i
// over finite chains with strictly increasing times, where rho is the
// product of Gaussian step kernels times the bridge conditional weight of
// the functional.  It is evaluated by an O(M^2) chain recursion
//   h_j = bh v_j ( rho_{t_j}(x_j) c_j + sum_{i < j} h_i rho_{t_j - t_i}(x_j - x_i) c_ij )
// with total e^{-bh kappa_a} (E_Q[f] + sum_j h_j tail_j); the c-factors are
// the per-gap bridge box weights (all 1 for f = 1).

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "polymerlab/bump.hpp"
#include "polymerlab/functionals.hpp"
#include "polymerlab/numeric.hpp"

namespace polymerlab {

struct CloudPoint {
  double t = 0.0;
  double x[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
  double v = 0.0;  // mark (weight), >= the cloud floor a
};

struct PoissonCloud {
  std::vector<CloudPoint> points;  // sorted by time ascending
  double alpha = 0.0;              // mark exponent
  double a = 0.0;                  // weight floor, > 0
  double L = 0.0;                  // spatial half-width of the window
  int d = 1;
};

// Validates (a > 0, marks >= a, times in (0,1]) and sorts by time.
PoissonCloud make_cloud(std::vector<CloudPoint> points, double alpha, double a,
                        double L, int d);

// Poisson((2L)^d a^{-alpha}) points, (t,x) uniform on the window, marks by
// P(v > s) = (a/s)^alpha.  a = 0 is rejected (infinite intensity).
PoissonCloud sample_cloud(double alpha, double a, double L, int d,
                          std::uint64_t seed, std::uint64_t replica = 0);

// rho_t(x) = (2 pi t)^{-d/2} e^{-|x|^2 / 2t}, t > 0.
double gaussian_kernel(double t, const double* x, int d);

// prod_i rho_{t_i - t_{i-1}}(x_i - x_{i-1}) with (t_0, x_0) = (0, 0);
// times must be strictly increasing and positive.
double multistep_kernel(const std::vector<double>& ts,
                        const std::vector<std::array<double, kMaxDim>>& xs,
                        int d);

// Which centering constant multiplies the subset sum: the standard
// kappa_a = (alpha/(alpha-1)) a^{1-alpha} (0 for alpha < 1, log(1/a) at
// alpha = 1), or the shifted variant (alpha/(alpha-1))(a^{1-alpha} - 1)
// defined for alpha in (1,2).  The two partition values differ by the
// exact constant factor e^{-bh alpha/(alpha-1)}.
enum class CenteringVariant { standard, shifted };

struct ContinuumPartition {
  double value = 0.0;      // prefactor included
  double a = 0.0;
  double beta_hat = 0.0;
  double prefactor = 1.0;  // e^{-bh kappa}
};

// Chain recursion; f must be constant_one or cylinder (for anything else
// use continuum_partition_mc, which reports a standard error).
ContinuumPartition continuum_partition(
    const PoissonCloud& cloud, double beta_hat, const PathFunctional& f,
    CenteringVariant variant = CenteringVariant::standard);

// Explicit sum over all 2^M subsets; M <= 15.  Oracle for the recursion.
double continuum_partition_subsets(
    const PoissonCloud& cloud, double beta_hat, const PathFunctional& f,
    CenteringVariant variant = CenteringVariant::standard);

// Partition value for a general bounded observable g of the path at the
// given times: subset sum with the bridge conditional expectation of g
// estimated by exact bridge Monte Carlo per subset (M <= 12).
McEstimate continuum_partition_mc(
    const PoissonCloud& cloud, double beta_hat,
    const std::vector<double>& times,
    const std::function<double(
        const std::vector<std::array<double, kMaxDim>>&)>& g,
    std::int64_t samples, std::uint64_t seed);

// Both endpoints pinned: chains live in (t, t2), initial kernel from
// (t, x), terminal kernel into (t2, x2); empty-chain term
// rho_{t2-t}(x2-x); prefactor e^{-bh kappa_a (t2-t)}.
double continuum_point_to_point(const PoissonCloud& cloud, double beta_hat,
                                double t, const double* x, double t2,
                                const double* x2);

// Centered pairing <xi_omega^{(a)}, psi> = sum_{v_i >= a} v_i psi(t_i, x_i)
// - kappa_a int psi.  psi must be supported inside the cloud window and
// a must be >= the cloud's floor.
double pair_noise(const PoissonCloud& cloud, const SeparableBump& psi,
                  double alpha, double a);

// Upper bound on the expected number (hence the probability) of cloud
// points outside the spatial window whose single-point chain weight
// bh v rho_t(x) would exceed delta: (bh/delta)^alpha * int_0^1
// int_{|x|_inf > L} rho_t(x)^alpha dx dt, coordinate union bound for d >= 2.
double window_tail_bound(double alpha, double a, double L, double beta_hat,
                         int d, double delta);

}  // namespace polymerlab
