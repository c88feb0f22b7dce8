#include "polymerlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace polymerlab {

namespace {
constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> round_once(std::array<uint32_t, 4> c,
                                          std::array<uint32_t, 2> k) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c[0], hi0, lo0);
  mulhilo(kPhiloxM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}
}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    ctr = round_once(ctr, key);
  }
  return ctr;
}

uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed, uint64_t stream) {
  // Derive the 64-bit Philox key from the (seed, stream) pair; the stream id
  // also salts the high counter word so even a mixed-key collision would not
  // alias two streams.
  uint64_t k = mix64(seed ^ mix64(stream));
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
  counter_ = mix64(stream + 0x632BE59BD9B4E019ull) << 32;
}

void RngStream::refill() {
  std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
      0x706F6C79u,  // constant lane tags: distinct from site_uniform counters
      0x6D657267u};
  block_ = philox4x32(ctr, key_);
  ++counter_;
  avail_ = 4;
}

uint64_t RngStream::next_u64() {
  if (avail_ < 2) refill();
  uint64_t hi = block_[avail_ - 1];
  uint64_t lo = block_[avail_ - 2];
  avail_ -= 2;
  return (hi << 32) | lo;
}

double RngStream::u01() { return u64_to_unit(next_u64()); }

double RngStream::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = u01();
  double u2 = u01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

int64_t RngStream::poisson(double mean) {
  // Sum of independent Poissons is Poisson, so large means split exactly.
  int64_t total = 0;
  while (mean > 30.0) {
    double half = mean / 2.0;
    total += poisson(half);
    mean -= half;
  }
  // Knuth inversion for the small-mean piece.
  double limit = std::exp(-mean);
  double prod = 1.0;
  int64_t count = -1;
  do {
    prod *= u01();
    ++count;
  } while (prod > limit);
  return total + count;
}

double site_uniform(uint64_t seed, uint64_t replica, int64_t n,
                    const int32_t* x, int d, uint32_t tag) {
  uint64_t k = mix64(seed ^ mix64(replica ^ 0xA5A5A5A500000001ull));
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(k),
                                 static_cast<uint32_t>(k >> 32)};
  uint32_t c0 = static_cast<uint32_t>(static_cast<uint64_t>(n));
  uint32_t c1 = d >= 1 ? static_cast<uint32_t>(x[0]) : 0u;
  uint32_t c2 = d >= 2 ? static_cast<uint32_t>(x[1]) : 0u;
  uint32_t c3 = tag ^ 0x11400000u;
  if (d > 2) {
    // Fold the remaining coordinates (only small-N slabs reach d >= 3).
    uint64_t fold = 0;
    for (int j = 2; j < d; ++j)
      fold = mix64(fold ^ static_cast<uint32_t>(x[j]) ^
                   (static_cast<uint64_t>(j) << 32));
    c3 ^= static_cast<uint32_t>(fold) ^ static_cast<uint32_t>(fold >> 32);
  }
  // High bits of n salt the key rather than the counter; N stays well below
  // 2^32 in every supported configuration.
  key[1] ^= static_cast<uint32_t>(static_cast<uint64_t>(n) >> 32);
  auto out = philox4x32({c0, c1, c2, c3}, key);
  uint64_t v = (static_cast<uint64_t>(out[0]) << 32) | out[1];
  return u64_to_unit(v);
}

}  // namespace polymerlab
