#include "polymerlab/bump.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymerlab/env_slab.hpp"
#include "polymerlab/numeric.hpp"

namespace polymerlab {

SeparableBump::SeparableBump(BumpFactor time, std::vector<BumpFactor> space)
    : time_(time), space_(std::move(space)) {
  if (space_.empty() || space_.size() > static_cast<size_t>(kMaxDim))
    throw std::invalid_argument("bump: needs 1..4 spatial factors");
  if (!(time_.width > 0.0))
    throw std::invalid_argument("bump: time width must be > 0");
  for (const auto& b : space_)
    if (!(b.width > 0.0))
      throw std::invalid_argument("bump: spatial width must be > 0");
  t_lo_ = std::max(0.0, time_.center - edge_sigmas() * time_.width);
  t_hi_ = std::min(1.0, time_.center + edge_sigmas() * time_.width);
  if (!(t_lo_ < t_hi_))
    throw std::invalid_argument("bump: time support misses [0,1]");
}

double SeparableBump::factor(double u, const BumpFactor& b) const {
  double z = (u - b.center) / b.width;
  if (std::abs(z) > edge_sigmas()) return 0.0;
  return std::exp(-0.5 * z * z);
}

double SeparableBump::operator()(double t, const double* x) const {
  if (t < t_lo_ || t > t_hi_) return 0.0;
  double v = factor(t, time_);
  for (size_t j = 0; j < space_.size(); ++j) {
    if (v == 0.0) return 0.0;
    v *= factor(x[j], space_[j]);
  }
  return v;
}

double SeparableBump::x_lo(int j) const {
  return space_[static_cast<size_t>(j)].center -
         edge_sigmas() * space_[static_cast<size_t>(j)].width;
}

double SeparableBump::x_hi(int j) const {
  return space_[static_cast<size_t>(j)].center +
         edge_sigmas() * space_[static_cast<size_t>(j)].width;
}

double SeparableBump::integral(int power) const {
  if (power != 1 && power != 2)
    throw std::invalid_argument("bump integral: power must be 1 or 2");
  const GaussLegendre& gl = gauss_legendre(64);
  auto axis = [&](const BumpFactor& b, double lo, double hi) {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      double u = mid + half * gl.nodes[i];
      double v = factor(u, b);
      s += gl.weights[i] * (power == 1 ? v : v * v);
    }
    return s * half;
  };
  double total = axis(time_, t_lo_, t_hi_);
  for (size_t j = 0; j < space_.size(); ++j)
    total *= axis(space_[j], x_lo(static_cast<int>(j)),
                  x_hi(static_cast<int>(j)));
  return total;
}

void SeparableBump::for_each_lattice_site(
    int64_t N,
    const std::function<void(int64_t, const int32_t*, double)>& fn) const {
  int dd = d();
  double scale = std::sqrt(static_cast<double>(dd) / static_cast<double>(N));
  auto n_min = static_cast<int64_t>(std::ceil(t_lo_ * static_cast<double>(N)));
  auto n_max =
      static_cast<int64_t>(std::floor(t_hi_ * static_cast<double>(N)));
  n_min = std::max<int64_t>(n_min, 1);
  n_max = std::min(n_max, N);
  int64_t lo[kMaxDim], hi[kMaxDim];
  for (int j = 0; j < dd; ++j) {
    lo[j] = static_cast<int64_t>(std::ceil(x_lo(j) / scale));
    hi[j] = static_cast<int64_t>(std::floor(x_hi(j) / scale));
  }
  int32_t x[kMaxDim] = {0, 0, 0, 0};
  double xr[kMaxDim];
  for (int64_t n = n_min; n <= n_max; ++n) {
    int par = static_cast<int>(n & 1);
    int64_t clo[kMaxDim], chi[kMaxDim];
    bool empty = false;
    for (int j = 0; j < dd; ++j) {
      clo[j] = std::max(lo[j], -n);
      chi[j] = std::min(hi[j], n);
      if (clo[j] > chi[j]) empty = true;
    }
    if (empty) continue;
    double t = static_cast<double>(n) / static_cast<double>(N);
    // odometer over the box, last coordinate on the parity sublattice
    for (int j = 0; j + 1 < dd; ++j) x[j] = static_cast<int32_t>(clo[j]);
    for (;;) {
      int64_t s = 0;
      for (int j = 0; j + 1 < dd; ++j) s += x[j];
      int64_t v0 = clo[dd - 1];
      if ((((v0 + s) % 2) + 2) % 2 != par) ++v0;
      for (int64_t v = v0; v <= chi[dd - 1]; v += 2) {
        x[dd - 1] = static_cast<int32_t>(v);
        for (int j = 0; j < dd; ++j) xr[j] = scale * x[j];
        double val = operator()(t, xr);
        if (val != 0.0) fn(n, x, val);
      }
      int j = dd - 2;
      while (j >= 0 && x[j] == chi[j]) {
        x[j] = static_cast<int32_t>(clo[j]);
        --j;
      }
      if (j < 0) break;
      ++x[j];
    }
  }
}

double SeparableBump::lattice_sum(int64_t N, int power) const {
  if (power != 1 && power != 2)
    throw std::invalid_argument("bump lattice sum: power must be 1 or 2");
  double total = 0.0;
  for_each_lattice_site(N, [&](int64_t, const int32_t*, double v) {
    total += power == 1 ? v : v * v;
  });
  return total;
}

bool SeparableBump::fits_lattice(int64_t N) const {
  int dd = d();
  double scale = std::sqrt(static_cast<double>(dd) / static_cast<double>(N));
  auto n_min = static_cast<int64_t>(std::ceil(t_lo_ * static_cast<double>(N)));
  n_min = std::max<int64_t>(n_min, 1);
  for (int j = 0; j < dd; ++j) {
    double reach = std::max(std::abs(x_lo(j)), std::abs(x_hi(j))) / scale;
    if (reach > static_cast<double>(n_min)) return false;
  }
  return true;
}

bool SeparableBump::fits_window(double L) const {
  for (int j = 0; j < d(); ++j)
    if (x_lo(j) < -L || x_hi(j) > L) return false;
  return true;
}

}  // namespace polymerlab
