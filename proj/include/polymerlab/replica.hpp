#pragma once
// Second-moment identity for the band-truncated partition function. With
// B = eta^{[a,b)} (band truncation, b finite), two independent copies of
// the walk, and L_N = #{1 <= n <= N : S^1_n = S^2_n},
//
//   E[(Z^{[a,b)})^2] / E[Z^{[a,b)}]^2 = E^{x2}[(1 + r)^{L_N}],
//   r = beta_N^2 Var(B) / E[1 + beta_N B]^2,
//
// and E[Z^{[a,b)}] = (1 + beta_N E[B])^N in closed form. The module exposes
// the closed-form moments, two Monte-Carlo estimators of the two sides, and
// an exact small-N evaluation of the overlap side.

#include <cstdint>

#include "polymerlab/lattice_partition.hpp"
#include "polymerlab/scaling.hpp"

namespace polymerlab {

struct BandMoments {
  double mean = 0.0;    // E[B]
  double var = 0.0;     // Var(B)
  double r = 0.0;       // beta_N^2 Var(B) / (1 + beta_N E[B])^2
  double mean_z = 0.0;  // E[Z^{[a,b)}] = (1 + beta_N E[B])^N
};

BandMoments band_moments(const ScalingPlan& plan, const TruncationSpec& trunc);

struct ReplicaMoment {
  McEstimate direct;   // mean of (Z / E[Z])^2 over environments
  McEstimate overlap;  // mean of (1+r)^{L_N} over walk pairs
  double r = 0.0;
};

ReplicaMoment replica_second_moment(const ScalingPlan& plan, double a,
                                    double b, int64_t env_replicas,
                                    int64_t pair_replicas, uint64_t seed);

// Exact E^{x2}[(1+r)^{L_N}] by dynamic programming over the difference walk
// (d = 1).
double overlap_moment_exact(int64_t N, double r);

}  // namespace polymerlab
