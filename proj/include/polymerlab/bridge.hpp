#pragma once
// Brownian bridge conditional expectations.
//
// The continuum chain weights for a cylinder functional factor into free
// heat kernels between pinned points times, per gap, the conditional
// probability that the bridge passes through every box whose time falls in
// that gap.  With at most one box per gap the factor is a product of
// one-dimensional Gaussian interval probabilities in closed form; with
// several boxes it is evaluated by recursive Gauss-Legendre integration
// over the earliest box.  A Monte-Carlo path (exact sequential Gaussian
// sampling of the bridge at the requested times) covers general bounded
// observables of finitely many marginals.

#include <cstdint>
#include <functional>
#include <vector>

#include "polymerlab/functionals.hpp"
#include "polymerlab/numeric.hpp"

namespace polymerlab {

// One pinned space-time point of the path.
struct Pin {
  double t = 0.0;
  double x[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
};

// Mean and (per coordinate) variance of B_s given surrounding pins.  The
// path always starts pinned at the origin at time zero; an explicit pin at
// t = 0 is therefore optional.  For s beyond the last pin the law is the
// free forward Gaussian from that pin.
struct BridgeMoment {
  double mean = 0.0;
  double var = 0.0;
};
BridgeMoment bridge_coordinate_moment(const std::vector<Pin>& pins, int d,
                                      double s, int coord);

// P(B_{s_m} in box_m for all m | B_s = y, B_{s2} = y2) with every box time
// inside [s, s2].  Boxes exactly at s or s2 degenerate to indicators at the
// pinned points.
double bridge_box_factor(const std::vector<CylinderBox>& boxes, int d,
                         double s, const double* y, double s2,
                         const double* y2);

// Same with a free right end: conditioning only on B_s = y.
double free_end_box_factor(const std::vector<CylinderBox>& boxes, int d,
                           double s, const double* y);

// E[ prod_m 1{B_{t_m} in box_m} | pins ] in closed/quadrature form.  Box
// times may fall anywhere in [0, 1]; pins must have strictly increasing
// times in [0, 1].
double bridge_expectation(const std::vector<CylinderBox>& boxes, int d,
                          const std::vector<Pin>& pins);

// E[ g(B_{s_1}, .., B_{s_k}) | pins ] by exact Gaussian sampling of the
// bridge at the requested times, with a jackknife standard error.  `times`
// must be strictly increasing; g receives one position per time.
McEstimate bridge_expectation_mc(
    const std::vector<double>& times,
    const std::function<double(
        const std::vector<std::array<double, kMaxDim>>&)>& g,
    int d, const std::vector<Pin>& pins, std::int64_t samples,
    std::uint64_t seed);

}  // namespace polymerlab
