#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "polymerlab/cloud.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

namespace {
double rel(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

CloudPoint pt(double t, double x0, double v) {
  CloudPoint p;
  p.t = t;
  p.x[0] = x0;
  p.v = v;
  return p;
}
}  // namespace

TEST_SUITE("cloud") {

TEST_CASE("cloud sampling: determinism, counts, and mark law") {
  PoissonCloud c1 = sample_cloud(1.5, 0.4, 2.0, 1, 9, 3);
  PoissonCloud c2 = sample_cloud(1.5, 0.4, 2.0, 1, 9, 3);
  REQUIRE(c1.points.size() == c2.points.size());
  for (size_t i = 0; i < c1.points.size(); ++i) {
    CHECK(c1.points[i].t == c2.points[i].t);
    CHECK(c1.points[i].v == c2.points[i].v);
  }
  // Points look valid and sorted.
  double prev = 0.0;
  for (const CloudPoint& p : c1.points) {
    CHECK(p.t >= prev);
    CHECK(p.t <= 1.0);
    CHECK(std::abs(p.x[0]) <= 2.0);
    CHECK(p.v >= 0.4);
    prev = p.t;
  }

  // Count statistics: Poisson((2L)^d a^{-alpha}).
  double lam = 4.0 * std::pow(0.4, -1.5);
  const int reps = 3000;
  double sum = 0.0, above = 0.0, marks = 0.0;
  for (int r = 0; r < reps; ++r) {
    PoissonCloud c = sample_cloud(1.5, 0.4, 2.0, 1, 123, uint64_t(r));
    sum += double(c.points.size());
    for (const CloudPoint& p : c.points) {
      marks += 1.0;
      if (p.v > 0.8) above += 1.0;
    }
  }
  double se = std::sqrt(lam / reps);
  CHECK(std::abs(sum / reps - lam) < 4.0 * se);
  // Mark tail: P(v > 2a) = 2^-alpha.
  double q = std::pow(2.0, -1.5);
  double qse = std::sqrt(q * (1.0 - q) / marks);
  CHECK(std::abs(above / marks - q) < 4.0 * qse);

  CHECK_THROWS_AS((void)sample_cloud(1.5, 0.0, 2.0, 1, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("make_cloud validates and sorts") {
  std::vector<CloudPoint> pts = {pt(0.7, 0.1, 1.0), pt(0.2, -0.3, 0.6)};
  PoissonCloud c = make_cloud(pts, 1.5, 0.5, 1.0, 1);
  CHECK(c.points[0].t == 0.2);
  CHECK(c.points[1].t == 0.7);
  CHECK_THROWS_AS((void)make_cloud({pt(0.5, 0.0, 0.2)}, 1.5, 0.5, 1.0, 1),
                  std::invalid_argument);  // mark below the floor
  CHECK_THROWS_AS((void)make_cloud({pt(1.5, 0.0, 1.0)}, 1.5, 0.5, 1.0, 1),
                  std::invalid_argument);  // time outside (0,1]
  CHECK_THROWS_AS((void)make_cloud({}, 1.5, 0.0, 1.0, 1),
                  std::invalid_argument);  // a = 0
}

TEST_CASE("gaussian step kernels") {
  double x0[1] = {0.0};
  CHECK(gaussian_kernel(0.5, x0, 1) ==
        doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
  double x1[1] = {0.7};
  CHECK(gaussian_kernel(0.25, x1, 1) ==
        doctest::Approx(std::exp(-0.49 / 0.5) / std::sqrt(0.5 * M_PI))
            .epsilon(1e-13));
  CHECK(gaussian_kernel(0.25, x1, 1) ==
        doctest::Approx(gaussian_kernel(0.25, x0, 1) * std::exp(-0.49 / 0.5))
            .epsilon(1e-14));
  double y[2] = {0.0, 0.0};
  CHECK(gaussian_kernel(0.5, y, 2) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
  // Multistep factorizes into single steps.
  std::vector<double> ts = {0.2, 0.5, 0.9};
  std::vector<std::array<double, kMaxDim>> xs = {
      {0.3, 0, 0, 0}, {-0.1, 0, 0, 0}, {0.4, 0, 0, 0}};
  double dx1[1] = {0.3};
  double dx2[1] = {-0.4};
  double dx3[1] = {0.5};
  double manual = gaussian_kernel(0.2, dx1, 1) * gaussian_kernel(0.3, dx2, 1) *
                  gaussian_kernel(0.4, dx3, 1);
  CHECK(rel(multistep_kernel(ts, xs, 1), manual) < 1e-13);
}

TEST_CASE("empty cloud: partition equals the bare prefactor") {
  PoissonCloud empty = make_cloud({}, 1.5, 0.2, 2.0, 1);
  ContinuumPartition z =
      continuum_partition(empty, 0.8, PathFunctional::constant_one());
  CHECK(z.value == doctest::Approx(std::exp(-0.8 * kappa_a(1.5, 0.2)))
                       .epsilon(1e-14));
  CHECK(z.prefactor == z.value);
  // For alpha < 1 there is no centering: empty cloud gives exactly 1.
  PoissonCloud light = make_cloud({}, 0.7, 0.2, 2.0, 1);
  ContinuumPartition z2 =
      continuum_partition(light, 0.8, PathFunctional::constant_one());
  CHECK(z2.value == 1.0);
}

TEST_CASE("chain recursion equals the subset enumeration") {
  RngStream rng(31, 0);
  for (int rep = 0; rep < 30; ++rep) {
    double alpha = (rep % 2 == 0) ? 1.5 : 0.7;
    PoissonCloud c = sample_cloud(alpha, 0.35, 1.5, 1, 501, uint64_t(rep));
    if (c.points.size() > 12) c.points.resize(12);
    PathFunctional f = PathFunctional::constant_one();
    if (rep % 3 == 2) {
      CylinderBox box;
      box.t = 0.5;
      box.lo[0] = -1.0;
      box.hi[0] = 1.2;
      f = PathFunctional::cylinder({box});
    }
    double fast = continuum_partition(c, 0.9, f).value;
    double slow = continuum_partition_subsets(c, 0.9, f);
    CHECK(rel(fast, slow) < 1e-12);
  }
}

TEST_CASE("centering variants differ by the exact constant factor") {
  PoissonCloud c = sample_cloud(1.5, 0.3, 1.5, 1, 77, 2);
  double bh = 0.6;
  double std_v =
      continuum_partition(c, bh, PathFunctional::constant_one()).value;
  double shifted = continuum_partition(c, bh, PathFunctional::constant_one(),
                                       CenteringVariant::shifted)
                       .value;
  // kappa_a - kappa'_a = alpha/(alpha-1) = 3 at alpha = 1.5.
  CHECK(rel(shifted, std_v * std::exp(bh * 3.0)) < 1e-12);
  // The shifted variant needs alpha in (1,2).
  PoissonCloud light = make_cloud({}, 0.7, 0.3, 1.5, 1);
  CHECK_THROWS_AS((void)continuum_partition(light, bh,
                                            PathFunctional::constant_one(),
                                            CenteringVariant::shifted),
                  std::invalid_argument);
}

TEST_CASE("point-to-point: empty cloud gives the free heat kernel") {
  PoissonCloud empty = make_cloud({}, 1.5, 0.25, 2.0, 1);
  double bh = 0.7;
  double x[1] = {0.2};
  double y[1] = {-0.4};
  double dx[1] = {-0.6};
  double expect = std::exp(-bh * kappa_a(1.5, 0.25) * 0.6) *
                  gaussian_kernel(0.6, dx, 1);
  CHECK(rel(continuum_point_to_point(empty, bh, 0.3, x, 0.9, y), expect) <
        1e-13);
}

TEST_CASE("noise pairing subtracts the centering mass") {
  SeparableBump psi({0.5, 0.08}, {{0.0, 0.2}});
  // Hand cloud: two points inside the bump support, one outside.
  std::vector<CloudPoint> pts = {pt(0.5, 0.0, 2.0), pt(0.55, 0.1, 0.9),
                                 pt(0.1, 1.9, 5.0)};
  for (double alpha : {1.5, 0.7}) {
    PoissonCloud c = make_cloud(pts, alpha, 0.5, 2.0, 1);
    double a = 0.8;  // pair at a higher floor than the cloud's
    double manual = 0.0;
    for (const CloudPoint& p : pts) {
      double xx[1] = {p.x[0]};
      if (p.v >= a) manual += p.v * psi(p.t, xx);
    }
    manual -= kappa_a(alpha, a) * psi.integral(1);
    CHECK(rel(pair_noise(c, psi, alpha, a), manual) < 1e-12);
  }
  // A floor below the cloud's own floor is refused (points are missing).
  PoissonCloud c = make_cloud(pts, 1.5, 0.5, 2.0, 1);
  CHECK_THROWS_AS((void)pair_noise(c, psi, 1.5, 0.3), std::invalid_argument);
  // A bump poking outside the window is refused.
  SeparableBump wide({0.5, 0.08}, {{0.0, 1.0}});
  CHECK_THROWS_AS((void)pair_noise(c, wide, 1.5, 0.8), std::invalid_argument);
}

TEST_CASE("monte carlo partition agrees with the exact recursion") {
  PoissonCloud c = sample_cloud(1.5, 0.5, 1.5, 1, 13, 1);
  if (c.points.size() > 10) c.points.resize(10);
  double bh = 0.8;
  double exact =
      continuum_partition(c, bh, PathFunctional::constant_one()).value;
  McEstimate mc = continuum_partition_mc(
      c, bh, {},
      [](const std::vector<std::array<double, kMaxDim>>&) { return 1.0; },
      4000, 3);
  CHECK(std::abs(mc.estimate - exact) < 4.0 * std::max(mc.std_error, 1e-12));
  // Cylinder observable: compare against the exact cylinder recursion.
  CylinderBox box;
  box.t = 0.6;
  box.lo[0] = -0.9;
  box.hi[0] = 1.1;
  double exact_cyl =
      continuum_partition(c, bh, PathFunctional::cylinder({box})).value;
  McEstimate mcc = continuum_partition_mc(
      c, bh, {0.6},
      [&](const std::vector<std::array<double, kMaxDim>>& ys) {
        return ys[0][0] >= -0.9 && ys[0][0] <= 1.1 ? 1.0 : 0.0;
      },
      20000, 7);
  CHECK(std::abs(mcc.estimate - exact_cyl) < 4.0 * mcc.std_error);
}

TEST_CASE("unsupported functionals are routed to the MC engine") {
  PoissonCloud c = sample_cloud(1.5, 0.5, 1.5, 1, 99, 0);
  PathFunctional g = PathFunctional::custom(
      [](const WalkPath&) { return 1.0; }, 1.0);
  CHECK_THROWS_AS((void)continuum_partition(c, 0.5, g), std::invalid_argument);
  PathFunctional cut = PathFunctional::constant_one().with_support_cutoff(1.0);
  CHECK_THROWS_AS((void)continuum_partition(c, 0.5, cut),
                  std::invalid_argument);
}

TEST_CASE("window tail bound is positive and monotone in the width") {
  double b1 = window_tail_bound(1.5, 0.3, 1.0, 1.0, 1, 0.01);
  double b2 = window_tail_bound(1.5, 0.3, 2.0, 1.0, 1, 0.01);
  double b3 = window_tail_bound(1.5, 0.3, 4.0, 1.0, 1, 0.01);
  CHECK(b1 > 0.0);
  CHECK(b2 < b1);
  CHECK(b3 < b2);
  // Larger tolerated weight delta shrinks the bound.
  CHECK(window_tail_bound(1.5, 0.3, 2.0, 1.0, 1, 0.1) < b2);
  // d=2 bound exists and is finite.
  CHECK(std::isfinite(window_tail_bound(1.3, 0.3, 3.0, 1.0, 2, 0.01)));
}

}  // TEST_SUITE
