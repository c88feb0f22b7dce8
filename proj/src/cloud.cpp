#include "polymerlab/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymerlab/bridge.hpp"
#include "polymerlab/rng.hpp"
#include "polymerlab/tail_law.hpp"

namespace polymerlab {

namespace {

void check_cloud_params(double alpha, double a, double L, int d) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("cloud: alpha must lie in (0,2)");
  if (!(a > 0.0))
    throw std::invalid_argument(
        "cloud: the weight floor a must be positive (a = 0 gives infinite "
        "intensity)");
  if (!(L > 0.0)) throw std::invalid_argument("cloud: window half-width L must be positive");
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("cloud: dimension must be in 1..4");
}

double kappa_for(double alpha, double a, CenteringVariant variant) {
  if (variant == CenteringVariant::standard) return kappa_a(alpha, a);
  return kappa_a_shifted(alpha, a);
}

bool sorted_by_time(const std::vector<CloudPoint>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].t < pts[i - 1].t) return false;
  return true;
}

std::vector<CylinderBox> functional_boxes(const PathFunctional& f) {
  switch (f.kind()) {
    case PathFunctional::Kind::constant_one:
      if (f.has_cutoff())
        throw std::invalid_argument(
            "continuum partition: support cutoffs are a lattice device; "
            "supported continuum classes are constant_one and cylinder");
      return {};
    case PathFunctional::Kind::cylinder: {
      if (f.has_cutoff())
        throw std::invalid_argument(
            "continuum partition: support cutoffs are a lattice device; "
            "supported continuum classes are constant_one and cylinder");
      std::vector<CylinderBox> boxes = f.boxes();
      std::sort(boxes.begin(), boxes.end(),
                [](const CylinderBox& a, const CylinderBox& b) {
                  return a.t < b.t;
                });
      return boxes;
    }
    default:
      throw std::invalid_argument(
          "continuum partition: general functionals need the Monte-Carlo "
          "variant (continuum_partition_mc), which reports a standard error");
  }
}

// Boxes with time in (lo, hi]; `sorted` is sorted by time.
std::vector<CylinderBox> boxes_between(const std::vector<CylinderBox>& sorted,
                                       double lo, double hi) {
  std::vector<CylinderBox> out;
  for (const CylinderBox& b : sorted)
    if (b.t > lo && b.t <= hi) out.push_back(b);
  return out;
}

double diff_kernel(const CloudPoint& from, const CloudPoint& to, int d) {
  double dx[kMaxDim];
  for (int j = 0; j < d; ++j) dx[j] = to.x[j] - from.x[j];
  return gaussian_kernel(to.t - from.t, dx, d);
}

}  // namespace

PoissonCloud make_cloud(std::vector<CloudPoint> points, double alpha, double a,
                        double L, int d) {
  check_cloud_params(alpha, a, L, d);
  for (const CloudPoint& p : points) {
    if (!(p.t > 0.0 && p.t <= 1.0))
      throw std::invalid_argument("cloud: point times must lie in (0,1]");
    if (!(p.v >= a))
      throw std::invalid_argument("cloud: every mark must be >= the floor a");
  }
  std::sort(points.begin(), points.end(),
            [](const CloudPoint& l, const CloudPoint& r) { return l.t < r.t; });
  PoissonCloud cloud;
  cloud.points = std::move(points);
  cloud.alpha = alpha;
  cloud.a = a;
  cloud.L = L;
  cloud.d = d;
  return cloud;
}

PoissonCloud sample_cloud(double alpha, double a, double L, int d,
                          std::uint64_t seed, std::uint64_t replica) {
  check_cloud_params(alpha, a, L, d);
  RngStream rs(seed, stream_id(stream_purpose::kCloud, replica));
  const double mean = std::pow(2.0 * L, d) * std::pow(a, -alpha);
  if (!(mean < 5e7))
    throw std::length_error(
        "cloud: expected point count exceeds 5e7; raise a or shrink L");
  const std::int64_t count = rs.poisson(mean);
  std::vector<CloudPoint> pts(static_cast<std::size_t>(count));
  for (CloudPoint& p : pts) {
    p.t = rs.u01();
    for (int j = 0; j < d; ++j) p.x[j] = (2.0 * rs.u01() - 1.0) * L;
    p.v = a * std::pow(rs.u01(), -1.0 / alpha);
  }
  return make_cloud(std::move(pts), alpha, a, L, d);
}

double gaussian_kernel(double t, const double* x, int d) {
  if (!(t > 0.0)) throw std::invalid_argument("gaussian kernel: time step must be positive");
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("gaussian kernel: dimension must be in 1..4");
  double q = 0.0;
  for (int j = 0; j < d; ++j) q += x[j] * x[j];
  return std::pow(2.0 * M_PI * t, -0.5 * d) * std::exp(-0.5 * q / t);
}

double multistep_kernel(const std::vector<double>& ts,
                        const std::vector<std::array<double, kMaxDim>>& xs,
                        int d) {
  if (ts.size() != xs.size())
    throw std::invalid_argument("multistep kernel: times and points must pair up");
  double prev_t = 0.0;
  double prev_x[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
  double prod = 1.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > prev_t))
      throw std::invalid_argument("multistep kernel: times must be strictly increasing");
    double dx[kMaxDim];
    for (int j = 0; j < d; ++j) dx[j] = xs[i][j] - prev_x[j];
    prod *= gaussian_kernel(ts[i] - prev_t, dx, d);
    prev_t = ts[i];
    for (int j = 0; j < d; ++j) prev_x[j] = xs[i][j];
  }
  return prod;
}

ContinuumPartition continuum_partition(const PoissonCloud& cloud,
                                       double beta_hat,
                                       const PathFunctional& f,
                                       CenteringVariant variant) {
  check_cloud_params(cloud.alpha, cloud.a, cloud.L, cloud.d);
  if (!(beta_hat >= 0.0))
    throw std::invalid_argument("continuum partition: beta_hat must be >= 0");
  if (!sorted_by_time(cloud.points))
    throw std::invalid_argument("continuum partition: cloud points must be sorted by time");
  const std::vector<CylinderBox> boxes = functional_boxes(f);
  const int d = cloud.d;
  const double origin[kMaxDim] = {0.0, 0.0, 0.0, 0.0};

  const double empty_term =
      boxes.empty() ? 1.0 : free_end_box_factor(boxes, d, 0.0, origin);

  const std::size_t m = cloud.points.size();
  std::vector<double> h(m, 0.0);
  double chains = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const CloudPoint& pj = cloud.points[j];
    double source = gaussian_kernel(pj.t, pj.x, d);
    if (!boxes.empty())
      source *= bridge_box_factor(boxes_between(boxes, -1.0, pj.t), d, 0.0,
                                  origin, pj.t, pj.x);
    double acc = source;
    for (std::size_t i = 0; i < j; ++i) {
      if (h[i] == 0.0) continue;
      const CloudPoint& pi = cloud.points[i];
      if (!(pi.t < pj.t)) continue;  // equal times never chain
      double step = diff_kernel(pi, pj, d);
      if (!boxes.empty())
        step *= bridge_box_factor(boxes_between(boxes, pi.t, pj.t), d, pi.t,
                                  pi.x, pj.t, pj.x);
      acc += h[i] * step;
    }
    h[j] = beta_hat * pj.v * acc;
    double tail = 1.0;
    if (!boxes.empty())
      tail = free_end_box_factor(boxes_between(boxes, pj.t, 2.0), d, pj.t,
                                 pj.x);
    chains += h[j] * tail;
  }

  ContinuumPartition out;
  out.a = cloud.a;
  out.beta_hat = beta_hat;
  out.prefactor = std::exp(-beta_hat * kappa_for(cloud.alpha, cloud.a, variant));
  out.value = out.prefactor * (empty_term + chains);
  if (!std::isfinite(out.value))
    throw std::runtime_error("continuum partition: value overflowed; the chain sum is degenerate");
  return out;
}

double continuum_partition_subsets(const PoissonCloud& cloud, double beta_hat,
                                   const PathFunctional& f,
                                   CenteringVariant variant) {
  const std::size_t m = cloud.points.size();
  if (m > 15)
    throw std::length_error("subset oracle: limited to 15 cloud points");
  const std::vector<CylinderBox> boxes = functional_boxes(f);
  const int d = cloud.d;
  const double origin[kMaxDim] = {0.0, 0.0, 0.0, 0.0};

  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double term = 1.0;
    double prev_t = 0.0;
    const double* prev_x = origin;
    bool valid = true;
    for (std::size_t j = 0; j < m && valid; ++j) {
      if (!(mask >> j & 1)) continue;
      const CloudPoint& p = cloud.points[j];
      if (!(p.t > prev_t)) {
        valid = false;  // duplicate times cannot form a chain
        break;
      }
      double dx[kMaxDim];
      for (int jj = 0; jj < d; ++jj) dx[jj] = p.x[jj] - prev_x[jj];
      term *= beta_hat * p.v * gaussian_kernel(p.t - prev_t, dx, d);
      if (!boxes.empty())
        term *= bridge_box_factor(
            boxes_between(boxes, prev_t == 0.0 ? -1.0 : prev_t, p.t), d,
            prev_t, prev_x, p.t, p.x);
      prev_t = p.t;
      prev_x = p.x;
    }
    if (!valid) continue;
    if (!boxes.empty())
      term *= free_end_box_factor(
          boxes_between(boxes, prev_t == 0.0 ? -1.0 : prev_t, 2.0), d, prev_t,
          prev_x);
    total += term;
  }
  return std::exp(-beta_hat * kappa_for(cloud.alpha, cloud.a, variant)) * total;
}

McEstimate continuum_partition_mc(
    const PoissonCloud& cloud, double beta_hat,
    const std::vector<double>& times,
    const std::function<double(
        const std::vector<std::array<double, kMaxDim>>&)>& g,
    std::int64_t samples, std::uint64_t seed) {
  const std::size_t m = cloud.points.size();
  if (m > 12)
    throw std::length_error(
        "continuum Monte Carlo: limited to 12 cloud points (2^M subsets, one "
        "bridge estimate each)");
  const int d = cloud.d;
  double est = 0.0;
  double var = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double coef = 1.0;
    std::vector<Pin> pins;
    double prev_t = 0.0;
    const double origin[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
    const double* prev_x = origin;
    bool valid = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const CloudPoint& p = cloud.points[j];
      if (!(p.t > prev_t)) {
        valid = false;
        break;
      }
      double dx[kMaxDim];
      for (int jj = 0; jj < d; ++jj) dx[jj] = p.x[jj] - prev_x[jj];
      coef *= beta_hat * p.v * gaussian_kernel(p.t - prev_t, dx, d);
      Pin pin;
      pin.t = p.t;
      for (int jj = 0; jj < d; ++jj) pin.x[jj] = p.x[jj];
      pins.push_back(pin);
      prev_t = p.t;
      prev_x = p.x;
    }
    if (!valid || coef == 0.0) continue;
    const McEstimate cond = bridge_expectation_mc(
        times, g, d, pins, samples,
        seed + 0x9e3779b97f4a7c15ull * (mask + 1));
    est += coef * cond.estimate;
    var += coef * coef * cond.std_error * cond.std_error;
  }
  const double pre =
      std::exp(-beta_hat * kappa_a(cloud.alpha, cloud.a));
  return McEstimate{pre * est, pre * std::sqrt(var)};
}

double continuum_point_to_point(const PoissonCloud& cloud, double beta_hat,
                                double t, const double* x, double t2,
                                const double* x2) {
  check_cloud_params(cloud.alpha, cloud.a, cloud.L, cloud.d);
  if (!(t < t2))
    throw std::invalid_argument("point to point: needs t < t2");
  if (!(t >= 0.0 && t2 <= 1.0))
    throw std::invalid_argument("point to point: endpoint times must lie in [0,1]");
  const int d = cloud.d;

  CloudPoint start;
  start.t = t;
  for (int j = 0; j < d; ++j) start.x[j] = x[j];
  CloudPoint finish;
  finish.t = t2;
  for (int j = 0; j < d; ++j) finish.x[j] = x2[j];

  std::vector<const CloudPoint*> inside;
  for (const CloudPoint& p : cloud.points)
    if (p.t > t && p.t < t2) inside.push_back(&p);

  std::vector<double> h(inside.size(), 0.0);
  double chains = 0.0;
  for (std::size_t j = 0; j < inside.size(); ++j) {
    double acc = diff_kernel(start, *inside[j], d);
    for (std::size_t i = 0; i < j; ++i) {
      if (h[i] == 0.0 || !(inside[i]->t < inside[j]->t)) continue;
      acc += h[i] * diff_kernel(*inside[i], *inside[j], d);
    }
    h[j] = beta_hat * inside[j]->v * acc;
    chains += h[j] * diff_kernel(*inside[j], finish, d);
  }
  const double empty_term = diff_kernel(start, finish, d);
  const double pre =
      std::exp(-beta_hat * kappa_a(cloud.alpha, cloud.a) * (t2 - t));
  return pre * (empty_term + chains);
}

double pair_noise(const PoissonCloud& cloud, const SeparableBump& psi,
                  double alpha, double a) {
  check_cloud_params(alpha, a, cloud.L, cloud.d);
  if (std::abs(alpha - cloud.alpha) > 1e-12)
    throw std::invalid_argument("pair_noise: alpha must match the cloud's mark exponent");
  if (a < cloud.a * (1.0 - 1e-12))
    throw std::invalid_argument(
        "pair_noise: cutoff a below the cloud floor; points with smaller "
        "weights were never sampled");
  if (psi.d() != cloud.d)
    throw std::invalid_argument("pair_noise: test-function dimension must match the cloud");
  if (!psi.fits_window(cloud.L))
    throw std::invalid_argument(
        "pair_noise: window too small; the test-function support must sit "
        "inside [-L,L]^d");
  double sum = 0.0;
  for (const CloudPoint& p : cloud.points)
    if (p.v >= a) sum += p.v * psi(p.t, p.x);
  return sum - kappa_a(alpha, a) * psi.integral(1);
}

double window_tail_bound(double alpha, double a, double L, double beta_hat,
                         int d, double delta) {
  check_cloud_params(alpha, a, L, d);
  if (!(beta_hat > 0.0 && delta > 0.0))
    throw std::invalid_argument("window tail bound: beta_hat and delta must be positive");
  // Per coordinate: full-line and one-sided-tail integrals of
  // ((2 pi t)^{-1/2} e^{-x^2/2t})^alpha in x.
  const auto full_axis = [&](double t) {
    return std::pow(2.0 * M_PI * t, 0.5 * (1.0 - alpha)) / std::sqrt(alpha);
  };
  const auto tail_axis = [&](double t) {
    return 2.0 * full_axis(t) * gaussian_upper_tail(L * std::sqrt(alpha / t));
  };
  const auto integrand = [&](double t) {
    if (!(t > 0.0)) return 0.0;
    return d * std::pow(full_axis(t), d - 1) * tail_axis(t);
  };
  const double space_time = integrate_finite(integrand, 0.0, 1.0, 1e-10);
  return std::pow(beta_hat / delta, alpha) * space_time;
}

}  // namespace polymerlab
