#pragma once
// Chaos expansion over chains of high-disorder sites, and the exact sparse
// form of the truncated partition function built on the same chains.
//
// Band set Omega^{[a,b)} = {(n,x): a V_N <= 1 + eta_{n,x} < b V_N}. The
// expansion object is
//
//   Zbar^{eta,[a,b)}(f) = E[f] + sum over time-increasing chains
//       (n_1,x_1),...,(n_k,x_k) in Omega of
//       beta^k eta_{n_1,x_1}..eta_{n_k,x_k} p(n,x,f),
//
// where p(n,x,f) is the product of walk kernels along the chain with the
// functional's weight folded in. The partition function itself is exactly
//
//   Z^{eta,[a,b)}(f) = (1 - beta kappa)^N [ E[f] + sum over chains of
//       prod_j (m_j - 1) p(n,x,f) ],
//
// with kappa = kappa_N^(a), the chains now running over every exceedance
// site {1+eta >= a V_N}, and m_j = (1+beta eta_j)/(1-beta kappa) on band
// sites, m_j = 1/(1-beta kappa) on sites at or above b V_N. Both sums are
// evaluated by one O(M^2) recursion over sites sorted by time; a 2^M subset
// enumeration serves as the oracle.

#include <cstdint>
#include <memory>
#include <vector>

#include "polymerlab/env_slab.hpp"
#include "polymerlab/functionals.hpp"
#include "polymerlab/scaling.hpp"

namespace polymerlab {

// Walk-kernel weights along a chain for a fixed functional:
//   empty()    = E[f(S)]
//   source(s)  = E[f-weight on [0, n_s]; S_{n_s} = x_s]
//   step(a,b)  = E[f-weight on (n_a, n_b]; S_{n_b} = x_b | S_{n_a} = x_a]
//   tail(s)    = E[f-weight on (n_s, N] | S_{n_s} = x_s]
// For f == 1 these are plain walk kernels; for the support cutoff they are
// kernels killed at the box boundary.
class ChainKernels {
 public:
  virtual ~ChainKernels() = default;
  virtual double empty() const = 0;
  virtual double source(const LatticeSite& s) const = 0;
  virtual double step(const LatticeSite& a, const LatticeSite& b) const = 0;
  virtual double tail(const LatticeSite& s) const = 0;
};

enum class KernelMode {
  automatic,   // closed forms where available, DP sweeps otherwise
  closed_form, // require the closed-form provider
  dp           // force masked DP sweeps (oracle / cross-check)
};

// Supported functionals: constant_one, optionally wrapped with a support
// cutoff (closed form in d=1 via reflection images, DP sweeps for d=2).
std::unique_ptr<ChainKernels> make_chain_kernels(
    const PathFunctional& f, int64_t N, int d,
    KernelMode mode = KernelMode::automatic);

// Chain recursion: empty + sum_j g_j tail_j with
// g_j = w_j (source_j + sum_{i: n_i < n_j} g_i step(i,j)).
// Sites are sorted internally by time; per-site weights w follow the sites.
double chain_total(std::vector<LatticeSite> sites, std::vector<double> w,
                   const ChainKernels& kernels);

// Brute-force oracle: explicit sum over all 2^M subsets (M <= 25); subsets
// with two sites at equal times are not chains and contribute nothing.
double chain_total_subsets(std::vector<LatticeSite> sites,
                           std::vector<double> w,
                           const ChainKernels& kernels);

// Band sites of a slab within |x|_inf <= min(n, radius); radius < 0 scans
// the full reachable diamond.
std::vector<LatticeSite> band_sites(const EnvSlab& env,
                                    const ScalingPlan& plan, double a,
                                    double b, int64_t radius = -1);

// Zbar^{eta,[a,b)}(f) for a slab-backed environment. a = 0 is rejected (the
// band would be the whole lattice).
double chaos_expansion(const EnvSlab& env, const ScalingPlan& plan, double a,
                       double b, const PathFunctional& f, int64_t radius = -1,
                       KernelMode mode = KernelMode::automatic);

// Exact sparse evaluation of both objects from an explicit exceedance list
// (every site with 1 + eta >= a V_N that can matter to the kernels).
struct SparsePartition {
  double z = 0.0;     // Z^{eta,[a,b)}(f)
  double zbar = 0.0;  // Zbar^{eta,[a,b)}(f)
};
SparsePartition sparse_partition(std::vector<LatticeSite> exceedances,
                                 const ScalingPlan& plan,
                                 const TruncationSpec& trunc,
                                 const PathFunctional& f,
                                 KernelMode mode = KernelMode::automatic);

// e^{-bh gamma_N 1{alpha=1}} Z^{eta,[a,b)}(f) / Zbar^{eta,[a,b)}(f) against
// its N -> inf limit e^{-bh kappa_a}.
struct RatioCheck {
  double ratio = 0.0;
  double target = 0.0;
  bool degenerate = false;  // Zbar == 0
  double z = 0.0;
  double zbar = 0.0;
};
RatioCheck ratio_check(const EnvSlab& env, const ScalingPlan& plan, double a,
                       double b, const PathFunctional& f, int64_t radius = -1,
                       KernelMode mode = KernelMode::automatic);

// Same check from a pre-sampled exceedance list (fast path for large N).
RatioCheck ratio_check_sparse(std::vector<LatticeSite> exceedances,
                              const ScalingPlan& plan, double a, double b,
                              const PathFunctional& f,
                              KernelMode mode = KernelMode::automatic);

}  // namespace polymerlab
