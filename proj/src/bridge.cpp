#include "polymerlab/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymerlab/rng.hpp"

namespace polymerlab {

namespace {

constexpr double kSigmaReach = 8.5;  // Gaussian mass beyond this is < 1e-17

void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("bridge: dimension must be in 1..4");
}

// Pins with strictly increasing times in [0,1]; the implicit start at the
// origin is prepended unless the caller pinned t = 0 there explicitly.
std::vector<Pin> with_origin(const std::vector<Pin>& pins, int d) {
  std::vector<Pin> out;
  out.push_back(Pin{});
  double prev = -1.0;
  for (const Pin& p : pins) {
    if (!(p.t >= 0.0 && p.t <= 1.0))
      throw std::invalid_argument("bridge: pin times must lie in [0,1]");
    if (!(p.t > prev))
      throw std::invalid_argument("bridge: pin times must be strictly increasing");
    prev = p.t;
    if (p.t == 0.0) {
      for (int j = 0; j < d; ++j)
        if (p.x[j] != 0.0)
          throw std::invalid_argument(
              "bridge: the path starts at the origin; a pin at t = 0 must sit there");
      continue;
    }
    out.push_back(p);
  }
  return out;
}

// Mean and variance of one coordinate of B_s between (s0,y0) and (s1,y1).
BridgeMoment gap_moment(double s0, double y0, double s1, double y1, double s) {
  BridgeMoment m;
  const double len = s1 - s0;
  const double u = (s - s0) / len;
  m.mean = y0 + u * (y1 - y0);
  m.var = (s - s0) * (s1 - s) / len;
  return m;
}

double interval_prob(double lo, double hi, double mean, double var) {
  if (var <= 0.0) return (mean >= lo && mean <= hi) ? 1.0 : 0.0;
  const double sd = std::sqrt(var);
  return gaussian_upper_tail((lo - mean) / sd) -
         gaussian_upper_tail((hi - mean) / sd);
}

double box_prob_at(const CylinderBox& box, int d, const double* mean,
                   double var) {
  double p = 1.0;
  for (int j = 0; j < d; ++j) {
    p *= interval_prob(box.lo[j], box.hi[j], mean[j], var);
    if (p == 0.0) return 0.0;
  }
  return p;
}

bool box_contains(const CylinderBox& box, int d, const double* x) {
  for (int j = 0; j < d; ++j)
    if (x[j] < box.lo[j] || x[j] > box.hi[j]) return false;
  return true;
}

// Interior boxes, sorted by time, all strictly inside (s, s2) (or (s, 1]
// for the free end).  Boxes at the gap endpoints have already been reduced
// to indicators at the pins by the caller.
double gap_factor(const std::vector<CylinderBox>& boxes, std::size_t from,
                  int d, double s, const double* y, bool pinned_right,
                  double s2, const double* y2) {
  if (from == boxes.size()) return 1.0;
  const CylinderBox& box = boxes[from];

  // Marginal of B at the box time given the gap endpoints.
  double mean[kMaxDim];
  double var;
  if (pinned_right) {
    var = gap_moment(s, 0.0, s2, 0.0, box.t).var;
    for (int j = 0; j < d; ++j)
      mean[j] = gap_moment(s, y[j], s2, y2[j], box.t).mean;
  } else {
    var = box.t - s;
    for (int j = 0; j < d; ++j) mean[j] = y[j];
  }

  if (from + 1 == boxes.size())
    return box_prob_at(box, d, mean, var);

  // Several boxes left: integrate the earliest one out and recurse.  The
  // tensor Gauss-Legendre grid grows as 48^(d*(boxes-1)); refuse sizes
  // that would not finish.
  const std::size_t remaining = boxes.size() - from;
  const double cost = std::pow(48.0, static_cast<double>(d) *
                                         static_cast<double>(remaining - 1));
  if (cost > 6.0e6)
    throw std::length_error(
        "bridge: too many boxes per gap for quadrature; use the Monte-Carlo "
        "bridge expectation");

  const GaussLegendre& gl = gauss_legendre(48);
  const double sd = std::sqrt(var);
  double lo[kMaxDim], hi[kMaxDim];
  for (int j = 0; j < d; ++j) {
    lo[j] = std::max(box.lo[j], mean[j] - kSigmaReach * sd);
    hi[j] = std::min(box.hi[j], mean[j] + kSigmaReach * sd);
    if (!(lo[j] < hi[j])) return 0.0;
  }

  const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
  std::size_t idx[kMaxDim] = {0, 0, 0, 0};
  double total = 0.0;
  for (;;) {
    double z[kMaxDim];
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      const double half = 0.5 * (hi[j] - lo[j]);
      z[j] = 0.5 * (lo[j] + hi[j]) + half * gl.nodes[idx[j]];
      const double dz = (z[j] - mean[j]) / sd;
      w *= half * gl.weights[idx[j]] * norm * std::exp(-0.5 * dz * dz);
    }
    total += w * gap_factor(boxes, from + 1, d, box.t, z, pinned_right, s2, y2);
    int j = 0;
    while (j < d && ++idx[j] == gl.nodes.size()) idx[j++] = 0;
    if (j == d) break;
  }
  return total;
}

std::vector<CylinderBox> sorted_boxes(std::vector<CylinderBox> boxes) {
  std::sort(boxes.begin(), boxes.end(),
            [](const CylinderBox& a, const CylinderBox& b) { return a.t < b.t; });
  return boxes;
}

}  // namespace

BridgeMoment bridge_coordinate_moment(const std::vector<Pin>& pins, int d,
                                      double s, int coord) {
  check_dim(d);
  if (coord < 0 || coord >= d)
    throw std::invalid_argument("bridge: coordinate index out of range");
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("bridge: time must lie in [0,1]");
  const std::vector<Pin> all = with_origin(pins, d);
  // Find the gap [t_i, t_{i+1}] containing s.
  std::size_t i = 0;
  while (i + 1 < all.size() && all[i + 1].t < s) ++i;
  if (i + 1 < all.size()) {
    const Pin& l = all[i];
    const Pin& r = all[i + 1];
    if (s <= l.t) return BridgeMoment{l.x[coord], 0.0};
    return gap_moment(l.t, l.x[coord], r.t, r.x[coord], s);
  }
  const Pin& l = all.back();
  return BridgeMoment{l.x[coord], s - l.t};
}

double bridge_box_factor(const std::vector<CylinderBox>& boxes, int d,
                         double s, const double* y, double s2,
                         const double* y2) {
  check_dim(d);
  if (!(s < s2)) throw std::invalid_argument("bridge: gap needs s < s2");
  std::vector<CylinderBox> inner;
  double pinned = 1.0;
  for (const CylinderBox& b : sorted_boxes(boxes)) {
    if (b.t < s || b.t > s2)
      throw std::invalid_argument("bridge: box time outside the gap");
    if (b.t == s) {
      pinned *= box_contains(b, d, y) ? 1.0 : 0.0;
    } else if (b.t == s2) {
      pinned *= box_contains(b, d, y2) ? 1.0 : 0.0;
    } else {
      inner.push_back(b);
    }
  }
  if (pinned == 0.0) return 0.0;
  return pinned * gap_factor(inner, 0, d, s, y, true, s2, y2);
}

double free_end_box_factor(const std::vector<CylinderBox>& boxes, int d,
                           double s, const double* y) {
  check_dim(d);
  std::vector<CylinderBox> inner;
  double pinned = 1.0;
  for (const CylinderBox& b : sorted_boxes(boxes)) {
    if (b.t < s) throw std::invalid_argument("bridge: box time before the pin");
    if (b.t == s) {
      pinned *= box_contains(b, d, y) ? 1.0 : 0.0;
    } else {
      inner.push_back(b);
    }
  }
  if (pinned == 0.0) return 0.0;
  return pinned * gap_factor(inner, 0, d, s, y, false, 0.0, nullptr);
}

double bridge_expectation(const std::vector<CylinderBox>& boxes, int d,
                          const std::vector<Pin>& pins) {
  check_dim(d);
  const std::vector<Pin> all = with_origin(pins, d);
  const std::vector<CylinderBox> sorted = sorted_boxes(boxes);
  double total = 1.0;
  std::size_t b = 0;
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    std::vector<CylinderBox> gap;
    while (b < sorted.size() && sorted[b].t <= all[i + 1].t) {
      if (sorted[b].t >= all[i].t) gap.push_back(sorted[b]);
      ++b;
    }
    total *= bridge_box_factor(gap, d, all[i].t, all[i].x, all[i + 1].t,
                               all[i + 1].x);
    if (total == 0.0) return 0.0;
  }
  std::vector<CylinderBox> rest(sorted.begin() + static_cast<std::ptrdiff_t>(b),
                                sorted.end());
  return total * free_end_box_factor(rest, d, all.back().t, all.back().x);
}

McEstimate bridge_expectation_mc(
    const std::vector<double>& times,
    const std::function<double(
        const std::vector<std::array<double, kMaxDim>>&)>& g,
    int d, const std::vector<Pin>& pins, std::int64_t samples,
    std::uint64_t seed) {
  check_dim(d);
  if (!g) throw std::invalid_argument("bridge: observable must be callable");
  if (samples < 2)
    throw std::invalid_argument("bridge: need at least two samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= 1.0))
      throw std::invalid_argument("bridge: observable times must lie in [0,1]");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("bridge: observable times must increase");
  }
  const std::vector<Pin> all = with_origin(pins, d);

  // Merge pin and observable times into one increasing schedule; sample
  // sequentially, each step Gaussian given the last sampled point and the
  // next pin (or free when no pin remains).
  struct Node {
    double t;
    bool is_obs;
    std::size_t pin_idx;
  };
  std::vector<Node> schedule;
  {
    std::size_t pi = 1;  // with_origin put the start pin first
    std::size_t oi = 0;
    while (pi < all.size() || oi < times.size()) {
      const bool take_pin =
          pi < all.size() &&
          (oi >= times.size() || all[pi].t <= times[oi] + 0.0);
      if (take_pin && oi < times.size() && all[pi].t == times[oi]) {
        schedule.push_back(Node{all[pi].t, true, pi});
        ++pi;
        ++oi;
      } else if (take_pin) {
        schedule.push_back(Node{all[pi].t, false, pi});
        ++pi;
      } else {
        schedule.push_back(Node{times[oi], true, 0});
        ++oi;
      }
    }
  }

  RngStream rs(seed, stream_id(stream_purpose::kBridgeMc, 0));
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(samples));
  std::vector<std::array<double, kMaxDim>> obs(times.size());
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    double cur_t = 0.0;
    double cur_x[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
    std::size_t next_pin = 1;
    std::size_t obs_at = 0;
    for (const Node& node : schedule) {
      while (next_pin < all.size() && all[next_pin].t < node.t) ++next_pin;
      double x[kMaxDim];
      if (node.pin_idx != 0) {
        for (int j = 0; j < d; ++j) x[j] = all[node.pin_idx].x[j];
        next_pin = node.pin_idx + 1;
      } else if (next_pin < all.size()) {
        const Pin& r = all[next_pin];
        const double var = gap_moment(cur_t, 0.0, r.t, 0.0, node.t).var;
        const double sd = std::sqrt(std::max(var, 0.0));
        for (int j = 0; j < d; ++j)
          x[j] = gap_moment(cur_t, cur_x[j], r.t, r.x[j], node.t).mean +
                 sd * rs.normal();
      } else {
        const double sd = std::sqrt(std::max(node.t - cur_t, 0.0));
        for (int j = 0; j < d; ++j) x[j] = cur_x[j] + sd * rs.normal();
      }
      if (node.is_obs) {
        for (int j = 0; j < d; ++j) obs[obs_at][j] = x[j];
        for (int j = d; j < kMaxDim; ++j) obs[obs_at][j] = 0.0;
        ++obs_at;
      }
      cur_t = node.t;
      for (int j = 0; j < d; ++j) cur_x[j] = x[j];
    }
    vals.push_back(g(obs));
  }
  const auto [mean, se] = jackknife_mean(vals);
  return McEstimate{mean, se};
}

}  // namespace polymerlab
