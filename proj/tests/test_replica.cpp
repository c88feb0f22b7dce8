#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "polymerlab/replica.hpp"

using namespace polymerlab;

namespace {
double rel(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}
}  // namespace

TEST_SUITE("replica") {

TEST_CASE("band moments match hand-computed truncated integrals") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(law, 64, 1, 1.0);
  double a = 0.1, b = 4.0;
  TruncationSpec trunc = TruncationSpec::make(plan, a, b);
  BandMoments bm = band_moments(plan, trunc);
  double V = plan.V_N();
  // B = -kappa below aV, eta on [aV, bV), 0 at and above bV.
  double kap = trunc.kappa_N_a;
  double p_below = law.cdf(a * V);
  double m_band =
      law.truncated_moment(1, b * V).exact - law.truncated_moment(1, a * V).exact;
  double mean = -kap * p_below + m_band;
  CHECK(rel(bm.mean, mean) < 1e-12);
  double s_band =
      law.truncated_moment(2, b * V).exact - law.truncated_moment(2, a * V).exact;
  double second = kap * kap * p_below + s_band;
  CHECK(rel(bm.var, second - mean * mean) < 1e-12);
  double betan = plan.beta_N();
  CHECK(rel(bm.r, betan * betan * bm.var /
                      ((1.0 + betan * bm.mean) * (1.0 + betan * bm.mean))) <
        1e-13);
  CHECK(rel(bm.mean_z, std::pow(1.0 + betan * bm.mean, 64.0)) < 1e-12);
  // Frozen values from the exact formulas at this configuration.
  CHECK(bm.r == doctest::Approx(0.278789).epsilon(1e-4));
  CHECK(bm.mean_z == doctest::Approx(0.221278).epsilon(1e-4));
}

TEST_CASE("exact overlap moment: closed forms at tiny N") {
  // N=1: the two walks meet at n=1 iff both step the same way: P = 1/2.
  // E[(1+r)^{L_1}] = 1/2 (1+r) + 1/2.
  double r = 0.37;
  CHECK(overlap_moment_exact(1, r) ==
        doctest::Approx(0.5 * (1.0 + r) + 0.5).epsilon(1e-14));
  // N=2 by enumerating the difference walk D_n = S^1_n - S^2_n:
  // D_1 = 0 w.p. 1/2 (then D_2 = 0 w.p. 1/2), D_1 = +-2 w.p. 1/4 each
  // (then D_2 = 0 w.p. 1/4).
  double e2 = 0.5 * (1.0 + r) * (0.5 * (1.0 + r) + 0.5) +
              0.5 * (0.25 * (1.0 + r) + 0.75);
  CHECK(overlap_moment_exact(2, r) == doctest::Approx(e2).epsilon(1e-14));
  // r = 0 collapses to 1 for any N.
  CHECK(overlap_moment_exact(25, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  // Monotone in r.
  CHECK(overlap_moment_exact(8, 0.2) < overlap_moment_exact(8, 0.3));
}

TEST_CASE("direct and overlap estimators agree with the exact value") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(law, 16, 1, 1.0);
  double a = 0.3, b = 3.0;
  ReplicaMoment rm = replica_second_moment(plan, a, b, 20000, 20000, 77);
  double exact = overlap_moment_exact(16, rm.r);
  // Overlap side is light-tailed: tight agreement.
  CHECK(std::abs(rm.overlap.estimate - exact) < 4.0 * rm.overlap.std_error);
  // Direct side is heavy-tailed; compare within combined error bars.
  double combined = std::hypot(rm.direct.std_error, rm.overlap.std_error);
  CHECK(std::abs(rm.direct.estimate - exact) < 6.0 * combined);
  // r matches the closed-form band moments.
  BandMoments bm = band_moments(plan, TruncationSpec::make(plan, a, b));
  CHECK(rel(rm.r, bm.r) < 1e-13);
}

TEST_CASE("upper band cutoff is required for the second moment") {
  TailLaw law = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(law, 16, 1, 1.0);
  CHECK_THROWS_AS((void)replica_second_moment(
                      plan, 0.3, std::numeric_limits<double>::infinity(),
                      1000, 1000, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
