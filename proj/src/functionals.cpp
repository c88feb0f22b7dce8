#include "polymerlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace polymerlab {

void rescaled_point(const WalkPath& path, double t, double* out) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("rescaled path: t must lie in [0,1]");
  double scale = std::sqrt(static_cast<double>(path.d) /
                           static_cast<double>(path.N));
  double nt = static_cast<double>(path.N) * t;
  auto k = static_cast<int64_t>(std::floor(nt));
  if (k >= path.N) k = path.N - 1;
  double w = nt - static_cast<double>(k);
  const auto& p0 = path.pos[static_cast<size_t>(k)];
  const auto& p1 = path.pos[static_cast<size_t>(k) + 1];
  for (int j = 0; j < path.d; ++j)
    out[j] = scale * ((1.0 - w) * p0[static_cast<size_t>(j)] +
                      w * p1[static_cast<size_t>(j)]);
}

double rescaled_supnorm(const WalkPath& path) {
  int64_t best = 0;
  for (const auto& p : path.pos)
    for (int j = 0; j < path.d; ++j)
      best = std::max<int64_t>(best, std::llabs(p[static_cast<size_t>(j)]));
  return static_cast<double>(best) *
         std::sqrt(static_cast<double>(path.d) / static_cast<double>(path.N));
}

bool CylinderBox::contains(const double* y, int d) const {
  for (int j = 0; j < d; ++j)
    if (y[j] < lo[j] || y[j] > hi[j]) return false;
  return true;
}

PathFunctional PathFunctional::constant_one() { return PathFunctional(); }

PathFunctional PathFunctional::cylinder(std::vector<CylinderBox> boxes) {
  PathFunctional f;
  f.kind_ = Kind::cylinder;
  for (const auto& b : boxes) {
    if (b.t < 0.0 || b.t > 1.0)
      throw std::invalid_argument("cylinder: box time must lie in [0,1]");
    for (int j = 0; j < kMaxDim; ++j)
      if (!(b.lo[j] <= b.hi[j]))
        throw std::invalid_argument("cylinder: box needs lo <= hi");
  }
  f.boxes_ = std::move(boxes);
  std::sort(f.boxes_.begin(), f.boxes_.end(),
            [](const CylinderBox& a, const CylinderBox& b) { return a.t < b.t; });
  return f;
}

PathFunctional PathFunctional::custom(
    std::function<double(const WalkPath&)> g, double bound) {
  if (!g) throw std::invalid_argument("custom functional: empty callable");
  if (!(bound > 0.0) || !std::isfinite(bound))
    throw std::invalid_argument("custom functional: needs a finite bound");
  PathFunctional f;
  f.kind_ = Kind::custom;
  f.g_ = std::move(g);
  f.bound_ = bound;
  return f;
}

PathFunctional PathFunctional::with_support_cutoff(double A) const {
  if (!(A >= 0.0))
    throw std::invalid_argument("support cutoff: radius A must be >= 0");
  PathFunctional f = *this;
  f.cutoff_A_ = A;
  return f;
}

int64_t PathFunctional::cutoff_lattice_radius(double A, int64_t N, int d) {
  double r = (A + 0.5) * std::sqrt(static_cast<double>(N) /
                                   static_cast<double>(d));
  return static_cast<int64_t>(std::floor(r));
}

double PathFunctional::evaluate(const WalkPath& path) const {
  if (has_cutoff()) {
    int64_t R = cutoff_lattice_radius(cutoff_A_, path.N, path.d);
    for (const auto& p : path.pos)
      for (int j = 0; j < path.d; ++j)
        if (std::llabs(p[static_cast<size_t>(j)]) > R) return 0.0;
  }
  double val = 1.0;
  if (kind_ == Kind::cylinder) {
    double y[kMaxDim];
    for (const auto& b : boxes_) {
      rescaled_point(path, b.t, y);
      if (!b.contains(y, path.d)) return 0.0;
    }
  } else if (kind_ == Kind::custom) {
    val = g_(path);
  }
  return val;
}

std::string PathFunctional::describe() const {
  std::string s;
  switch (kind_) {
    case Kind::constant_one: s = "one"; break;
    case Kind::cylinder: s = "cyl" + std::to_string(boxes_.size()); break;
    case Kind::custom: s = "custom"; break;
  }
  if (has_cutoff()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "|A=%g", cutoff_A_);
    s += buf;
  }
  return s;
}

}  // namespace polymerlab
