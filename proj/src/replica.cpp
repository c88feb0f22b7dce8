#include "polymerlab/replica.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polymerlab/numeric.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

BandMoments band_moments(const ScalingPlan& plan,
                         const TruncationSpec& trunc) {
  if (!std::isfinite(trunc.b))
    throw std::invalid_argument(
        "replica moments: need a finite upper cutoff b so the truncated "
        "second moment exists");
  const TailLaw& law = plan.law();
  double V = plan.V_N();
  double lo = trunc.a * V, hi = trunc.b * V;
  double kappa = trunc.kappa_N_a;
  double p_below = law.cdf(lo);
  double t1_band =
      law.truncated_moment(1, hi).exact - law.truncated_moment(1, lo).exact;
  double t2_band =
      law.truncated_moment(2, hi).exact - law.truncated_moment(2, lo).exact;
  BandMoments m;
  m.mean = t1_band - kappa * p_below;
  double second = t2_band + kappa * kappa * p_below;
  m.var = second - m.mean * m.mean;
  double beta = plan.beta_N();
  double denom = 1.0 + beta * m.mean;
  m.r = beta * beta * m.var / (denom * denom);
  m.mean_z = std::pow(denom, static_cast<double>(plan.N()));
  return m;
}

ReplicaMoment replica_second_moment(const ScalingPlan& plan, double a,
                                    double b, int64_t env_replicas,
                                    int64_t pair_replicas, uint64_t seed) {
  if (env_replicas < 2 || pair_replicas < 2)
    throw std::invalid_argument("replica moments: needs replicas >= 2");
  TruncationSpec trunc = TruncationSpec::make(plan, a, b);
  BandMoments m = band_moments(plan, trunc);
  int64_t N = plan.N();
  int d = plan.d();
  PathFunctional one = PathFunctional::constant_one();

  std::vector<double> direct(static_cast<size_t>(env_replicas));
  for (int64_t r = 0; r < env_replicas; ++r) {
    EnvSlab env = EnvSlab::keyed(plan.law(), N, d, seed,
                                 static_cast<uint64_t>(r));
    double z = partition_dp(env, plan.beta_N(), trunc, one).value;
    double zn = z / m.mean_z;
    direct[static_cast<size_t>(r)] = zn * zn;
  }

  std::vector<double> overlap(static_cast<size_t>(pair_replicas));
  for (int64_t r = 0; r < pair_replicas; ++r) {
    RngStream rs(seed, stream_id(stream_purpose::kReplicaPair,
                                 static_cast<uint64_t>(r)));
    // Two independent walks; track positions and count coincidence times.
    int32_t s1[kMaxDim] = {0, 0, 0, 0};
    int32_t s2[kMaxDim] = {0, 0, 0, 0};
    int64_t overlap_count = 0;
    for (int64_t n = 0; n < N; ++n) {
      for (int32_t* s : {s1, s2}) {
        auto dir = static_cast<int>(rs.u01() * (2.0 * d));
        if (dir >= 2 * d) dir = 2 * d - 1;
        s[dir / 2] = static_cast<int32_t>(s[dir / 2] +
                                          ((dir % 2 == 0) ? 1 : -1));
      }
      bool same = true;
      for (int j = 0; j < d; ++j) same = same && s1[j] == s2[j];
      if (same) ++overlap_count;
    }
    overlap[static_cast<size_t>(r)] =
        std::pow(1.0 + m.r, static_cast<double>(overlap_count));
  }

  ReplicaMoment out;
  auto [dm, dse] = jackknife_mean(direct);
  auto [om, ose] = jackknife_mean(overlap);
  out.direct = {dm, dse};
  out.overlap = {om, ose};
  out.r = m.r;
  return out;
}

double overlap_moment_exact(int64_t N, double r) {
  // Difference walk D_n = S^1_n - S^2_n in d = 1: steps +-2 w.p. 1/4 each,
  // 0 w.p. 1/2; collect a factor (1+r) whenever D_n = 0.
  if (N < 0) throw std::invalid_argument("overlap moment: N must be >= 0");
  auto R = static_cast<size_t>(2 * N);
  std::vector<double> cur(2 * R + 1, 0.0), nxt;
  cur[R] = 1.0;  // D_0 = 0 (no factor at time 0)
  for (int64_t n = 0; n < N; ++n) {
    nxt.assign(2 * R + 1, 0.0);
    for (size_t i = 0; i <= 2 * R; ++i) {
      double u = cur[i];
      if (u == 0.0) continue;
      nxt[i] += 0.5 * u;
      if (i >= 2) nxt[i - 2] += 0.25 * u;
      if (i + 2 <= 2 * R) nxt[i + 2] += 0.25 * u;
    }
    nxt[R] *= 1.0 + r;
    cur.swap(nxt);
  }
  double total = 0.0;
  for (double v : cur) total += v;
  return total;
}

}  // namespace polymerlab
