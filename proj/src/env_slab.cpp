#include "polymerlab/env_slab.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polymerlab {

namespace {
// Integers in [-R, R] congruent to par mod 2.
inline int64_t count_1d(int64_t R, int par) {
  if (R < 0) return 0;
  return ((R & 1) == par % 2) ? R + 1 : R;
}
// Smallest element of that set.
inline int64_t min_1d(int64_t R, int par) {
  return ((R & 1) == par % 2) ? -R : -R + 1;
}
}  // namespace

int64_t layer_site_count(int64_t n, int d, int64_t radius) {
  int64_t R = std::min(n, radius);
  if (R < 0) return 0;
  int par = static_cast<int>(n & 1);
  // DP over axes on the parity of the coordinate sum.
  int64_t even = 1, odd = 0;
  for (int j = 0; j < d; ++j) {
    int64_t ce = count_1d(R, 0), co = count_1d(R, 1);
    int64_t e2 = even * ce + odd * co;
    int64_t o2 = even * co + odd * ce;
    even = e2;
    odd = o2;
  }
  return par == 0 ? even : odd;
}

int64_t window_site_count(int64_t N, int d, int64_t radius) {
  int64_t total = 0;
  for (int64_t n = 1; n <= N; ++n) total += layer_site_count(n, d, radius);
  return total;
}

void for_each_site(int64_t N, int d, int64_t radius,
                   const std::function<void(int64_t, const int32_t*)>& fn) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("d: must be in [1," + std::to_string(kMaxDim) + "]");
  int32_t x[kMaxDim] = {0, 0, 0, 0};
  for (int64_t n = 1; n <= N; ++n) {
    int64_t R = std::min(n, radius);
    if (R < 0) continue;
    int par = static_cast<int>(n & 1);
    // Odometer over [-R, R]^d; emit sites whose coordinate sum matches parity.
    for (int j = 0; j < d; ++j) x[j] = static_cast<int32_t>(-R);
    for (;;) {
      int64_t s = 0;
      for (int j = 0; j < d; ++j) s += x[j];
      if (((s % 2) + 2) % 2 == par) fn(n, x);
      int j = d - 1;
      while (j >= 0 && x[j] == R) {
        x[j] = static_cast<int32_t>(-R);
        --j;
      }
      if (j < 0) break;
      ++x[j];
    }
  }
}

uint64_t pack_site(int64_t n, const int32_t* x, int d) {
  if (n < 0 || n >= (int64_t{1} << 24))
    throw std::length_error("slab map: layer index too large to pack");
  uint64_t key = static_cast<uint64_t>(n);
  for (int j = 0; j < d; ++j) {
    int64_t zz = (static_cast<int64_t>(x[j]) << 1) ^ (x[j] >> 31);
    if (zz < 0 || zz >= (int64_t{1} << 10))
      throw std::length_error("slab map: coordinate too large to pack");
    key = (key << 10) | static_cast<uint64_t>(zz);
  }
  return key | (static_cast<uint64_t>(d) << 60);
}

EnvSlab EnvSlab::keyed(const TailLaw& law, int64_t N, int d, uint64_t seed,
                       uint64_t replica) {
  if (N < 1) throw std::invalid_argument("N: must be >= 1");
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("d: must be in [1," + std::to_string(kMaxDim) + "]");
  EnvSlab slab;
  slab.law_ = law;
  slab.N_ = N;
  slab.d_ = d;
  slab.keyed_ = true;
  slab.seed_ = seed;
  slab.replica_ = replica;
  return slab;
}

EnvSlab EnvSlab::from_values(const TailLaw& law, int64_t N, int d,
                             std::vector<LatticeSite> values,
                             double default_eta, uint64_t seed,
                             uint64_t replica) {
  EnvSlab slab = keyed(law, N, d, seed, replica);
  slab.keyed_ = false;
  slab.default_eta_ = default_eta;
  if (default_eta <= -1.0)
    throw std::invalid_argument("slab: eta must stay > -1");
  for (const auto& s : values) {
    if (s.eta <= -1.0)
      throw std::invalid_argument("slab: eta must stay > -1");
    slab.values_[pack_site(s.n, s.x, d)] = s.eta;
  }
  return slab;
}

double EnvSlab::eta(int64_t n, const int32_t* x) const {
  if (n < 1 || n > N_)
    throw std::out_of_range("slab: layer outside [1,N]");
  int64_t s = 0;
  for (int j = 0; j < d_; ++j) {
    if (std::llabs(x[j]) > n) throw std::out_of_range("slab: |x| > n");
    s += x[j];
  }
  if ((((s - n) % 2) + 2) % 2 != 0)
    throw std::out_of_range("slab: site off the walk's parity sublattice");
  if (keyed_) {
    double u = site_uniform(seed_, replica_, n, x, d_);
    return law_.sample_eta(u);
  }
  auto it = values_.find(pack_site(n, x, d_));
  return it == values_.end() ? default_eta_ : it->second;
}

std::vector<LatticeSite> EnvSlab::materialize(int64_t radius) const {
  std::vector<LatticeSite> out;
  int64_t count = window_site_count(std::min(N_, int64_t{1} << 22), d_, radius);
  if (count > (int64_t{5} << 22))
    throw std::length_error(
        "slab: window too large to materialize (tighten radius)");
  out.reserve(static_cast<size_t>(count));
  for_each_site(N_, d_, radius, [&](int64_t n, const int32_t* x) {
    LatticeSite s;
    s.n = n;
    for (int j = 0; j < d_; ++j) s.x[j] = x[j];
    s.eta = eta(n, x);
    out.push_back(s);
  });
  return out;
}

std::vector<LatticeSite> EnvSlab::scan_exceedances(double threshold,
                                                   int64_t radius) const {
  std::vector<LatticeSite> out;
  for_each_site(N_, d_, radius, [&](int64_t n, const int32_t* x) {
    double e = eta(n, x);
    if (1.0 + e >= threshold) {
      LatticeSite s;
      s.n = n;
      for (int j = 0; j < d_; ++j) s.x[j] = x[j];
      s.eta = e;
      out.push_back(s);
    }
  });
  return out;
}

WindowIndex::WindowIndex(int64_t N, int d, int64_t radius)
    : N_(N), d_(d), radius_(radius) {
  if (d != 1 && d != 2)
    throw std::invalid_argument("WindowIndex: indexed windows support d <= 2");
  prefix_.resize(static_cast<size_t>(N) + 1, 0);
  for (int64_t n = 1; n <= N; ++n)
    prefix_[static_cast<size_t>(n)] =
        prefix_[static_cast<size_t>(n) - 1] + layer_site_count(n, d, radius);
}

LatticeSite WindowIndex::site_at(int64_t index) const {
  if (index < 0 || index >= total())
    throw std::out_of_range("WindowIndex: index outside window");
  // Binary search for the layer.
  int64_t lo = 1, hi = N_;
  while (lo < hi) {
    int64_t mid = (lo + hi) / 2;
    if (prefix_[static_cast<size_t>(mid)] > index)
      hi = mid;
    else
      lo = mid + 1;
  }
  int64_t n = lo;
  int64_t j = index - prefix_[static_cast<size_t>(n) - 1];
  int64_t R = std::min(n, radius_);
  int par = static_cast<int>(n & 1);
  LatticeSite s;
  s.n = n;
  if (d_ == 1) {
    s.x[0] = static_cast<int32_t>(min_1d(R, par) + 2 * j);
  } else {
    // x1 blocks come in pairs of consecutive values whose sizes sum to 2R+1.
    int64_t pair_total = 2 * R + 1;
    int64_t pair = j / pair_total;
    int64_t rem = j % pair_total;
    int64_t x1 = -R + 2 * pair;
    int64_t s0 = count_1d(R, static_cast<int>(((par + x1) % 2 + 2) % 2));
    if (rem >= s0) {
      x1 += 1;
      rem -= s0;
    }
    int par2 = static_cast<int>(((par + x1) % 2 + 2) % 2);
    s.x[0] = static_cast<int32_t>(x1);
    s.x[1] = static_cast<int32_t>(min_1d(R, par2) + 2 * rem);
  }
  return s;
}

std::vector<LatticeSite> sample_exceedances(const TailLaw& law,
                                            const WindowIndex& window,
                                            double threshold, uint64_t seed,
                                            uint64_t replica) {
  double p = law.tail_prob(threshold);
  std::vector<LatticeSite> out;
  int64_t M = window.total();
  if (!(p > 0.0)) return out;
  RngStream rs(seed, stream_id(stream_purpose::kExceedance, replica));
  if (p >= 1.0)
    throw std::invalid_argument(
        "sample_exceedances: threshold below the law's lower endpoint would "
        "select every site");
  double log_q = std::log1p(-p);
  int64_t idx = -1;
  for (;;) {
    double gap = std::floor(std::log(rs.u01()) / log_q);
    if (gap > static_cast<double>(M)) break;
    idx += 1 + static_cast<int64_t>(gap);
    if (idx >= M) break;
    LatticeSite s = window.site_at(idx);
    // Conditional tail draw: P(X > z | X > threshold) = tail(z)/p.
    s.eta = law.tail_inverse(rs.u01() * p) - 1.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace polymerlab
