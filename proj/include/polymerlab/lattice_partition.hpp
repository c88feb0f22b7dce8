#pragma once
// Discrete polymer partition functions over an environment slab:
//
//   Z^{eta,[a,b)}_{N,beta}(f) = E[ f(S^(N)) prod_{n=1}^N (1 + beta eta^{[a,b)}_{n,S_n}) ]
//
// with E over the simple random walk from the origin. Engines:
//   * partition_dp          -- exact forward transfer-matrix DP, O(N^{d+1});
//                              functionals that factor over the Markov
//                              structure only (constant_one, cylinder boxes,
//                              support cutoff).
//   * partition_bruteforce  -- exact path enumeration, any functional,
//                              guarded by (2d)^N <= 1e7.
//   * partition_mc          -- unbiased path-average Monte Carlo with
//                              jackknife standard error, any functional.
// Plus the exact Gibbs path sampler (backward DP + forward draw) and the
// point-to-point partition function pinned at both ends.

#include <cstdint>

#include "polymerlab/env_slab.hpp"
#include "polymerlab/functionals.hpp"
#include "polymerlab/numeric.hpp"
#include "polymerlab/scaling.hpp"

namespace polymerlab {

struct PartitionResult {
  double value = 0.0;          // partition value, `normalization` included
  double normalization = 1.0;  // prefactor folded into value (1 when none)
  int64_t N = 0;
  int d = 1;
  double beta = 0.0;
  TruncationSpec trunc;
  std::string functional;
};

// P(S_n = x) for the d-dimensional simple walk (exact; closed form for
// d <= 2, layer convolution otherwise).
double walk_kernel(int64_t n, const int32_t* x, int d);

// Exact DP. radius < 0 runs over the full reachable diamond |x|_inf <= n
// (exact); radius >= 0 additionally absorbs the walk outside
// |x|_inf <= radius (a window approximation used by large-N experiments,
// with error bounded by the walk's large-deviation tail; it is exact when f
// carries a support cutoff with R*(A) <= radius).
PartitionResult partition_dp(const EnvSlab& env, double beta,
                             const TruncationSpec& trunc,
                             const PathFunctional& f, int64_t radius = -1);

PartitionResult partition_bruteforce(const EnvSlab& env, double beta,
                                     const TruncationSpec& trunc,
                                     const PathFunctional& f);

McEstimate partition_mc(const EnvSlab& env, double beta,
                        const TruncationSpec& trunc, const PathFunctional& f,
                        int64_t replicas, uint64_t seed);

// Z^eta[(n1,x1),(n2,x2)]: both endpoints pinned, disorder collected on
// layers n1+1..n2. `normalized` = (1/2)(N/d)^{d/2} e^{-bh gamma_N 1{alpha=1}}
// times the raw value when a plan is supplied (N is the plan's horizon),
// otherwise equals the raw value.
struct PointToPointResult {
  double value = 0.0;
  double normalized = 0.0;
};

PointToPointResult point_to_point_partition(const EnvSlab& env, double beta,
                                            const TruncationSpec& trunc,
                                            int64_t n1, const int32_t* x1,
                                            int64_t n2, const int32_t* x2,
                                            const ScalingPlan* plan = nullptr);

// Exact draw from the Gibbs measure P^eta_{N,beta} (density proportional to
// prod (1+beta eta^{[a,b)}_{n,S_n}) over walk paths): one backward sweep for
// the partial partition values, then a forward chain of categorical draws.
WalkPath sample_polymer_path(const EnvSlab& env, double beta,
                             const TruncationSpec& trunc, uint64_t seed,
                             uint64_t replica = 0);

}  // namespace polymerlab
