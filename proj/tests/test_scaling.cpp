#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "polymerlab/scaling.hpp"

using namespace polymerlab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("scaling") {

TEST_CASE("critical exponent by dimension") {
  CHECK(alpha_critical(1) == 2.0);
  CHECK(alpha_critical(2) == 2.0);
  CHECK(alpha_critical(3) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(alpha_critical(4) == 1.5);
}

TEST_CASE("disorder scale solves the exact quantile equation") {
  // Constant-phi families: V_N = x_m (2 d^{d/2})^{-1/alpha} N^{(1+d/2)/alpha}.
  TailLaw cp = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(cp, 1024, 1, 1.0);
  double q = 2.0 * std::pow(1024.0, -1.5);
  CHECK(plan.V_N() ==
        doctest::Approx(cp.x_m() * std::pow(q, -1.0 / 1.5)).epsilon(1e-14));
  CHECK(plan.V_N() == doctest::Approx(215.02652584872).epsilon(1e-12));
  CHECK(cp.tail_prob(plan.V_N()) == doctest::Approx(q).epsilon(1e-13));

  TailLaw p07 = TailLaw::make(TailFamily::pareto, 0.7);
  ScalingPlan pl2 = ScalingPlan::make(p07, 64, 2, 0.5);
  double q2 = 2.0 * 2.0 * std::pow(64.0, -2.0);
  CHECK(pl2.V_N() == doctest::Approx(std::pow(q2, -1.0 / 0.7)).epsilon(1e-14));

  // Log family: V_N inverts the exact tail, so the defining identity holds.
  TailLaw lp = TailLaw::make(TailFamily::log_pareto, 0.9, 0.0, 1.5);
  ScalingPlan pl3 = ScalingPlan::make(lp, 256, 1, 1.0);
  double q3 = 2.0 * std::pow(256.0, -1.5);
  CHECK(lp.tail_prob(pl3.V_N()) == doctest::Approx(q3).epsilon(1e-11));
}

TEST_CASE("inverse temperature pairs with the scale exactly") {
  // beta_N V_N = beta_hat (N/d)^{d/2} / 2 with no rounding.
  TailLaw cp = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(cp, 1024, 1, 1.0);
  CHECK(plan.beta_N() * plan.V_N() == doctest::Approx(16.0).epsilon(1e-15));
  ScalingPlan pd2 =
      ScalingPlan::make(TailLaw::make(TailFamily::pareto, 0.7), 100, 2, 0.25);
  CHECK(pd2.beta_N() * pd2.V_N() ==
        doctest::Approx(0.25 * 50.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("plan construction guards") {
  TailLaw p18 = TailLaw::make(TailFamily::pareto, 1.8, 0.0, 1.0, true);
  // alpha must be below the critical exponent for the target dimension.
  CHECK_NOTHROW((void)ScalingPlan::make(p18, 64, 1, 1.0));
  CHECK_THROWS_AS((void)ScalingPlan::make(p18, 64, 3, 1.0),
                  std::invalid_argument);
  TailLaw p07 = TailLaw::make(TailFamily::pareto, 0.7);
  CHECK_THROWS_AS((void)ScalingPlan::make(p07, 0, 1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ScalingPlan::make(p07, 64, 0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ScalingPlan::make(p07, 64, 1, 0.0),
                  std::invalid_argument);
  // N must be large enough that the defining quantile is < 1.
  CHECK_THROWS_AS((void)ScalingPlan::make(p07, 1, 1, 1.0),
                  std::invalid_argument);
  // beta_N must land in (0,1): enormous beta_hat at small N pushes it past 1.
  CHECK_THROWS_AS((void)ScalingPlan::make(p07, 4, 1, 1e9),
                  std::runtime_error);
  // Small N with moderate beta_hat is fine (beta_N is tiny automatically).
  CHECK_NOTHROW((void)ScalingPlan::make(TailLaw::make(TailFamily::pareto, 0.8),
                                        12, 1, 1.0));
}

TEST_CASE("alpha=1 normalization constant") {
  TailLaw p1 = TailLaw::make(TailFamily::pareto, 1.0);
  ScalingPlan plan = ScalingPlan::make(p1, 512, 1, 0.7);
  double V = plan.V_N();
  // gamma_N = E[eta 1{1+eta < V_N}] = log V - 1 + 1/V for the unit pareto.
  CHECK(plan.gamma_N() ==
        doctest::Approx(std::log(V) - 1.0 + 1.0 / V).epsilon(1e-12));
  CHECK(plan.gamma_factor() ==
        doctest::Approx(std::exp(-0.7 * plan.gamma_N())).epsilon(1e-13));
  ScalingPlan p15 = ScalingPlan::make(
      TailLaw::make(TailFamily::centered_pareto, 1.5), 512, 1, 0.7);
  CHECK_THROWS_AS((void)p15.gamma_N(), std::invalid_argument);
  CHECK(p15.gamma_factor() == 1.0);
}

TEST_CASE("discrete centering constant") {
  TailLaw cp = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(cp, 1024, 1, 1.0);
  double a = 0.2;
  double u = a * plan.V_N();
  // kappa_N_a = -E[eta | 1+eta < a V_N], computable from exact moments.
  CHECK(plan.kappa_N_a(a) == doctest::Approx(-cp.mean_below(u)).epsilon(1e-13));
  CHECK(plan.kappa_N_a(a) > 0.0);
  // For alpha < 1 no centering is applied.
  ScalingPlan heavy =
      ScalingPlan::make(TailLaw::make(TailFamily::pareto, 0.7), 1024, 1, 1.0);
  CHECK(heavy.kappa_N_a(0.2) == 0.0);
  // Empty conditioning event must be refused, not silently zero.
  CHECK_THROWS_AS((void)plan.kappa_N_a(1e-9), std::invalid_argument);
  // Continuum constant via the plan matches the free function.
  CHECK(plan.kappa(0.2) == doctest::Approx(kappa_a(1.5, 0.2)).epsilon(1e-15));
}

TEST_CASE("band truncation spec and its action on the disorder") {
  TailLaw cp = TailLaw::make(TailFamily::centered_pareto, 1.5);
  ScalingPlan plan = ScalingPlan::make(cp, 256, 1, 1.0);
  TruncationSpec spec = TruncationSpec::make(plan, 0.25, 2.0);
  CHECK(spec.V_N == plan.V_N());
  CHECK(spec.kappa_N_a == doctest::Approx(plan.kappa_N_a(0.25)).epsilon(1e-15));
  double V = plan.V_N();
  // Below the band: replaced by the negative centering constant.
  CHECK(truncate_eta(0.1 * V - 1.0, spec) == -spec.kappa_N_a);
  CHECK(truncate_eta(-0.5, spec) == -spec.kappa_N_a);
  // Inside the band: untouched.
  CHECK(truncate_eta(0.5 * V - 1.0, spec) == 0.5 * V - 1.0);
  CHECK(truncate_eta(0.25 * V - 1.0, spec) == 0.25 * V - 1.0);  // closed left
  // At and above the upper cutoff: zeroed.
  CHECK(truncate_eta(2.0 * V - 1.0, spec) == 0.0);  // open right endpoint
  CHECK(truncate_eta(7.0 * V, spec) == 0.0);

  TruncationSpec upper_only = TruncationSpec::make(plan, 0.0, 3.0);
  CHECK(upper_only.kappa_N_a == 0.0);
  CHECK(truncate_eta(-0.9, upper_only) == -0.9);
  CHECK(truncate_eta(5.0 * V, upper_only) == 0.0);

  TruncationSpec ident = TruncationSpec::none();
  CHECK(ident.is_identity());
  CHECK(truncate_eta(123.456, ident) == 123.456);
  // Lower-only band keeps arbitrarily large values.
  TruncationSpec lower = TruncationSpec::make(plan, 0.3, kInf);
  CHECK(truncate_eta(50.0 * V, lower) == 50.0 * V);
  CHECK(truncate_eta(0.0, lower) == -lower.kappa_N_a);

  CHECK_THROWS_AS((void)TruncationSpec::make(plan, -0.1, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)TruncationSpec::make(plan, 1.2, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)TruncationSpec::make(plan, 0.2, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)TruncationSpec::make(plan, 0.0, 0.5),
                  std::invalid_argument);
}

}  // TEST_SUITE
