#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "polymerlab/lattice_partition.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

namespace {
double rel(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}
}  // namespace

TEST_SUITE("lattice_partition") {

TEST_CASE("walk kernel closed forms and normalization") {
  int32_t x1[1] = {1};
  CHECK(walk_kernel(1, x1, 1) == 0.5);
  int32_t x0[1] = {0};
  CHECK(walk_kernel(2, x0, 1) == 0.5);
  int32_t x2[1] = {2};
  CHECK(walk_kernel(2, x2, 1) == 0.25);
  // Binomial closed form at n=6, x=2: C(6,4)/2^6 = 15/64.
  CHECK(walk_kernel(6, x2, 1) == doctest::Approx(15.0 / 64.0).epsilon(1e-15));
  // Off-parity and out-of-range sites carry zero mass.
  CHECK(walk_kernel(2, x1, 1) == 0.0);
  int32_t far[1] = {9};
  CHECK(walk_kernel(2, far, 1) == 0.0);
  // Total mass 1 across each layer, d = 1, 2, 3.
  for (int d : {1, 2, 3}) {
    for (int64_t n : {1, 2, 5}) {
      double total = 0.0;
      for_each_site(n, d, n, [&](int64_t m, const int32_t* x) {
        if (m == n) total += walk_kernel(n, x, d);
      });
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  // d=2 factorizes over rotated coordinates: P(S_1 = e_1) = 1/4.
  int32_t e1[2] = {1, 0};
  CHECK(walk_kernel(1, e1, 2) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("single-step slab has a closed form") {
  TailLaw law = TailLaw::make(TailFamily::pareto, 0.7);
  EnvSlab env = EnvSlab::keyed(law, 1, 1, 3, 0);
  int32_t xm[1] = {-1};
  int32_t xp[1] = {1};
  double expect = 1.0 + 0.3 * 0.5 * (env.eta(1, xm) + env.eta(1, xp));
  PartitionResult dp =
      partition_dp(env, 0.3, TruncationSpec::none(), PathFunctional::constant_one());
  CHECK(dp.value == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("dynamic programming equals brute-force path enumeration") {
  RngStream pick(2024, 0);
  // d = 1 slabs up to N = 12, mixed laws, truncations, and functionals.
  for (int rep = 0; rep < 12; ++rep) {
    int64_t N = 3 + int64_t(pick.u01() * 10.0);  // 3..12
    TailLaw law = (rep % 2 == 0)
                      ? TailLaw::make(TailFamily::pareto, 0.7)
                      : TailLaw::make(TailFamily::centered_pareto, 1.5);
    EnvSlab env = EnvSlab::keyed(law, N, 1, 77, uint64_t(rep));
    double beta = 0.05 + 0.4 * pick.u01();
    TruncationSpec trunc = TruncationSpec::none();
    if (rep % 3 == 1) {
      // beta_hat small enough that beta_N stays in (0,1) down to N = 3, and
      // a large enough that a V_N > x_m (non-empty band) for both laws.
      ScalingPlan plan = ScalingPlan::make(law, N, 1, 0.4);
      trunc = TruncationSpec::make(plan, 0.6, 2.5);
    } else if (rep % 3 == 2) {
      // Handmade band spec (not tied to a plan), exercising both edges.
      trunc.a = 0.5;
      trunc.b = 3.0;
      trunc.kappa_N_a = 0.2;
      trunc.V_N = 2.0;
    }
    PathFunctional f = PathFunctional::constant_one();
    if (rep % 4 == 1) {
      CylinderBox box;
      box.t = 0.5;
      box.lo[0] = -0.8;
      box.hi[0] = 0.9;
      f = PathFunctional::cylinder({box});
    } else if (rep % 4 == 2) {
      f = PathFunctional::constant_one().with_support_cutoff(1.0);
    }
    PartitionResult dp = partition_dp(env, beta, trunc, f);
    PartitionResult bf = partition_bruteforce(env, beta, trunc, f);
    CHECK(rel(dp.value, bf.value) < 1e-12);
  }
  // d = 2 slabs up to N = 6.
  for (int rep = 0; rep < 6; ++rep) {
    int64_t N = 3 + (rep % 4);
    TailLaw law = TailLaw::make(TailFamily::pareto, 0.9);
    EnvSlab env = EnvSlab::keyed(law, N, 2, 31, uint64_t(rep));
    double beta = 0.3;
    PartitionResult dp = partition_dp(env, beta, TruncationSpec::none(),
                                      PathFunctional::constant_one());
    PartitionResult bf = partition_bruteforce(env, beta, TruncationSpec::none(),
                                              PathFunctional::constant_one());
    CHECK(rel(dp.value, bf.value) < 1e-12);
  }
}

TEST_CASE("brute force rejects oversized path counts") {
  TailLaw law = TailLaw::make(TailFamily::pareto, 0.7);
  EnvSlab env = EnvSlab::keyed(law, 40, 1, 1, 0);
  CHECK_THROWS_AS((void)partition_bruteforce(env, 0.2, TruncationSpec::none(),
                                             PathFunctional::constant_one()),
                  std::length_error);
}

TEST_CASE("monte carlo estimate is consistent with the exact value") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  EnvSlab env = EnvSlab::keyed(law, 10, 1, 12, 4);
  double beta = 0.25;
  CylinderBox box;
  box.t = 0.7;
  box.lo[0] = -1.5;
  box.hi[0] = 1.5;
  PathFunctional f = PathFunctional::cylinder({box});
  PartitionResult exact = partition_dp(env, beta, TruncationSpec::none(), f);
  McEstimate mc =
      partition_mc(env, beta, TruncationSpec::none(), f, 40000, 9);
  CHECK(std::abs(mc.estimate - exact.value) < 4.0 * mc.std_error);
  // The custom-path evaluator agrees too (same g as the cylinder).
  PathFunctional g = PathFunctional::custom(
      [&](const WalkPath& p) {
        double y[kMaxDim];
        rescaled_point(p, 0.7, y);
        return box.contains(y, 1) ? 1.0 : 0.0;
      },
      1.0);
  McEstimate mcg = partition_mc(env, beta, TruncationSpec::none(), g, 40000, 9);
  CHECK(mcg.estimate == doctest::Approx(mc.estimate).epsilon(1e-12));
}

TEST_CASE("pinned partition functions sum to the free-end value") {
  TailLaw law = TailLaw::make(TailFamily::pareto, 0.7);
  EnvSlab env = EnvSlab::keyed(law, 8, 1, 5, 2);
  double beta = 0.2;
  PartitionResult dp = partition_dp(env, beta, TruncationSpec::none(),
                                    PathFunctional::constant_one());
  int32_t origin[1] = {0};
  double total = 0.0;
  for_each_site(8, 1, 8, [&](int64_t n, const int32_t* x) {
    if (n != 8) return;
    PointToPointResult p2p = point_to_point_partition(
        env, beta, TruncationSpec::none(), 0, origin, 8, x);
    total += p2p.value;
  });
  CHECK(rel(total, dp.value) < 1e-12);
  // Raw == normalized when no plan is supplied.
  int32_t x2[1] = {2};
  PointToPointResult p = point_to_point_partition(
      env, beta, TruncationSpec::none(), 0, origin, 8, x2);
  CHECK(p.value == p.normalized);
  // With a plan, normalized folds in (1/2)(N/d)^{d/2}.
  ScalingPlan plan = ScalingPlan::make(law, 8, 1, 1.0);
  PointToPointResult q = point_to_point_partition(
      env, beta, TruncationSpec::none(), 0, origin, 8, x2, &plan);
  CHECK(q.normalized ==
        doctest::Approx(0.5 * std::pow(8.0, 0.5) * q.value).epsilon(1e-13));
}

TEST_CASE("gibbs sampler reproduces exact path probabilities") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  int64_t N = 4;
  EnvSlab env = EnvSlab::keyed(law, N, 1, 21, 0);
  double beta = 0.35;
  // Exact path law: weight(path) = 2^-N prod(1 + beta eta) / Z.
  PartitionResult z = partition_dp(env, beta, TruncationSpec::none(),
                                   PathFunctional::constant_one());
  std::map<std::vector<int32_t>, double> exact;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<int32_t> steps;
    int32_t pos = 0;
    double w = 1.0 / 16.0;
    for (int64_t n = 1; n <= N; ++n) {
      pos += (mask >> (n - 1)) & 1 ? 1 : -1;
      int32_t xx[1] = {pos};
      w *= 1.0 + beta * env.eta(n, xx);
      steps.push_back(pos);
    }
    exact[steps] += w / z.value;
  }
  const int reps = 40000;
  std::map<std::vector<int32_t>, int> counts;
  for (int r = 0; r < reps; ++r) {
    WalkPath path = sample_polymer_path(env, beta, TruncationSpec::none(), 5,
                                        uint64_t(r));
    REQUIRE(path.N == N);
    std::vector<int32_t> steps;
    for (int64_t n = 1; n <= N; ++n) steps.push_back(path.pos[size_t(n)][0]);
    counts[steps]++;
  }
  for (const auto& [steps, p] : exact) {
    double freq = double(counts[steps]) / reps;
    double se = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::abs(freq - p) < 4.5 * se);
  }
}

TEST_CASE("positivity and pathwise truncation monotonicity") {
  // For alpha < 1 (eta >= 0 after the pareto floor... eta = Z - 1 >= x_m - 1)
  // with x_m = 1 the disorder is nonnegative, so raising the lower cutoff
  // only removes nonnegative contributions: Z^{[a,inf)} is nonincreasing in a.
  TailLaw law = TailLaw::make(TailFamily::pareto, 0.7);
  int64_t N = 14;
  EnvSlab env = EnvSlab::keyed(law, N, 1, 8, 1);
  ScalingPlan plan = ScalingPlan::make(law, N, 1, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {0.0, 0.1, 0.3, 0.6, 1.0}) {
    TruncationSpec t = a == 0.0 ? TruncationSpec::none()
                                : TruncationSpec::make(plan, a, 1e12);
    PartitionResult res = partition_dp(env, plan.beta_N(), t,
                                       PathFunctional::constant_one());
    CHECK(res.value > 0.0);
    CHECK(res.value <= prev * (1.0 + 1e-14));
    prev = res.value;
  }
}

TEST_CASE("window radius: exact when it contains the cutoff") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  int64_t N = 16;
  EnvSlab env = EnvSlab::keyed(law, N, 1, 44, 0);
  PathFunctional f = PathFunctional::constant_one().with_support_cutoff(0.5);
  int64_t rstar = PathFunctional::cutoff_lattice_radius(0.5, N, 1);
  PartitionResult full = partition_dp(env, 0.2, TruncationSpec::none(), f);
  PartitionResult windowed =
      partition_dp(env, 0.2, TruncationSpec::none(), f, rstar);
  CHECK(rel(windowed.value, full.value) < 1e-13);
  // A window radius below the cutoff radius changes the value (absorption).
  PartitionResult clipped =
      partition_dp(env, 0.2, TruncationSpec::none(), f, rstar - 2);
  CHECK(clipped.value < full.value);
}

}  // TEST_SUITE
