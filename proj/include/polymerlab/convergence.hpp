#pragma once
// Convergence experiments: pairings of the rescaled disorder field against
// smooth test functions, two-sample distances between discrete and
// continuum marginals, truncation-error sweeps, and the truncation slope
// of the field variance.

#include <cstdint>
#include <string>
#include <vector>

#include "polymerlab/bump.hpp"
#include "polymerlab/chaos.hpp"
#include "polymerlab/cloud.hpp"
#include "polymerlab/env_slab.hpp"
#include "polymerlab/functionals.hpp"
#include "polymerlab/scaling.hpp"

namespace polymerlab {

// <xi_N^{(a)}, psi> = V_N^{-1} sum_{(n,x)} (eta^{(a)}_{n,x} - center)
// psi(n/N, x sqrt(d/N)) over the reachable lattice, with center =
// E[eta 1{eta <= V_N}] at alpha = 1 and 0 otherwise; a = 0 pairs the
// untruncated field.  psi's support must fit the reachable cone.
double xi_discrete_pair(const EnvSlab& env, const SeparableBump& psi,
                        const ScalingPlan& plan, double a);

// Same value computed from the exceedance set alone (a > 0): the a-cut
// field is -kappa_N^(a) off the set, so the pairing is
// V_N^{-1} [ sum_exc (eta + kappa) psi - (kappa + center) sum_all psi ].
// Every exceedance site where psi is nonzero must be in the list.
double xi_discrete_pair_sparse(const std::vector<LatticeSite>& exceedances,
                               const SeparableBump& psi,
                               const ScalingPlan& plan, double a);

// Centered truncation difference
//   V_N^{-1} sum (eta - E[eta | 1+eta < a V_N]) 1{1+eta < a V_N} psi.
// For alpha in [1,2) this is literally <xi_N - xi_N^{(a)}, psi>; for
// alpha < 1 the truncated field is uncentered by convention (kappa = 0)
// and this is its fluctuation part, the object the variance decay rate
// 2 - alpha describes.
double xi_truncation_diff(const EnvSlab& env, const SeparableBump& psi,
                          const ScalingPlan& plan, double a);

// Closed-form variance cap eps(a) N^{-(d/2+1)} sum_sites psi^2 with
// eps(a) = 2 d^{d/2} (alpha/(2-alpha)) a^{2-alpha}.
double xi_truncation_variance_cap(const ScalingPlan& plan, double a,
                                  const SeparableBump& psi);

enum class DistanceStatistic { ks, wasserstein1 };

struct DistanceReport {
  DistanceStatistic statistic = DistanceStatistic::ks;
  double value = 0.0;
  double se = 0.0;        // bootstrap SD for ks, 0 otherwise
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::string component;  // which marginal was compared
  double grid_value = 0.0;  // N (discrete side) or a
};

DistanceReport empirical_distance(const std::vector<double>& sample_a,
                                  const std::vector<double>& sample_b,
                                  DistanceStatistic statistic);

// Bootstrap standard deviation of the two-sample KS statistic
// (resampling both samples with replacement).
double ks_bootstrap_sd(const std::vector<double>& sample_a,
                       const std::vector<double>& sample_b, int resamples,
                       std::uint64_t seed);

// One replica of the joint marginal (pairing, normalized partition); both
// components come from the same disorder realization.
struct MarginalSample {
  double pairing = 0.0;
  double partition = 0.0;
};

struct MarginalExperiment {
  std::vector<std::int64_t> N_grid;
  std::vector<std::vector<MarginalSample>> discrete;  // one block per N
  std::vector<MarginalSample> continuum;
  std::vector<DistanceReport> reports;  // per N x component x statistic
};

// Discrete side per N: exceedance-sampled slabs in the diffusive window,
// (  <xi_N^{(a)}, psi>, e^{-bh gamma_N 1{alpha=1}} Z^{eta,a}_{N,beta_N}(f) );
// continuum side: Poisson clouds on [-L,L]^d,
// ( <xi_omega^{(a)}, psi>, Z^{omega,a}_{bh}(f) ).  psi may be null (pairing
// marginals then sit at 0); f must be constant_one, optionally with a
// support cutoff.  Refuses alpha >= min(1+2/d, 2), where the limiting
// partition function is degenerate.
MarginalExperiment marginal_convergence_experiment(
    const TailLaw& law, double beta_hat, const SeparableBump* psi,
    const PathFunctional& f, const std::vector<std::int64_t>& N_grid,
    double a, int d, double L, std::int64_t replicas, std::uint64_t seed);

// E[ (e^{-bh gamma_N 1{alpha=1}} |Z^{eta,a} - Z^{eta,0}|) ∧ 1 ] on a grid
// of (N, a), common slab per replica across the a-column; `sup_*` rows
// hold the maximum over N per a and its standard error.
struct TruncationCurve {
  std::vector<std::int64_t> N_grid;
  std::vector<double> a_grid;
  std::vector<std::vector<double>> estimate;   // [N index][a index]
  std::vector<std::vector<double>> std_error;  // same shape
  std::vector<double> sup_estimate;            // per a
  std::vector<double> sup_std_error;           // SE at the argmax N
};
TruncationCurve truncation_error_curve(const TailLaw& law, double beta_hat,
                                       int d,
                                       const std::vector<std::int64_t>& N_grid,
                                       const std::vector<double>& a_grid,
                                       std::int64_t replicas,
                                       std::uint64_t seed);

// Fits log E<xi_N - xi_N^{(a)}, psi>^2 against log a (theory slope
// 2 - alpha) and checks each point against the closed-form cap.  Fewer
// than 3 grid points are rejected; a psi that vanishes on the lattice is
// flagged instead of fitted.
struct SlopeExperiment {
  std::vector<double> a_grid;
  std::vector<double> second_moment;
  std::vector<double> std_error;
  std::vector<double> cap;
  double slope = 0.0;
  double intercept = 0.0;
  bool flagged_zero = false;
};
SlopeExperiment xi_truncation_slope(const TailLaw& law, int d,
                                    std::int64_t N, const SeparableBump& psi,
                                    const std::vector<double>& a_grid,
                                    std::int64_t replicas,
                                    std::uint64_t seed);

// Spatial half-width (in sqrt(N/d) units) of the exceedance window used by
// the sparse discrete replicas; kernel mass beyond it is negligible at
// double precision.
inline constexpr double kWindowSigmas = 12.0;

}  // namespace polymerlab
