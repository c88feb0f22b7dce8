#pragma once
// Counter-based random numbers (Philox4x32-10).
//
// Everything random in this project flows through one of two access patterns:
//   * SiteRng   -- a pure function of (seed, replica, site): any lattice value
//                  is reproducible in O(1) without streaming through the slab.
//   * RngStream -- a keyed sequential stream for replica-level sampling
//                  (walks, clouds, resampling). Streams with distinct keys are
//                  independent, so replica sweeps parallelize with no shared
//                  state and merge deterministically.

#include <array>
#include <cstdint>

namespace polymerlab {

// One Philox4x32-10 block: 128-bit counter, 64-bit key -> 128 random bits.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key);

// Map 64 random bits to a double in the open interval (0,1). Midpoints of
// 2^52 equal bins: every value (k + 1/2) 2^-52 is exactly representable, so
// the result is provably in [2^-53, 1 - 2^-53] with no endpoint rounding.
inline double u64_to_unit(uint64_t v) {
  return (static_cast<double>(v >> 12) + 0.5) * 0x1.0p-52;
}

uint64_t mix64(uint64_t x);  // splitmix64 finalizer

// Sequential stream; key = (seed, stream id). Copyable value type.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream);
  double   u01();       // strictly inside (0,1)
  uint64_t next_u64();
  double   normal();    // standard Gaussian (Box-Muller, deterministic)
  // Exact Poisson sample; splits large means into independent chunks.
  int64_t  poisson(double mean);

 private:
  void refill();
  std::array<uint32_t, 2> key_;
  uint64_t counter_ = 0;
  std::array<uint32_t, 4> block_{};
  int avail_ = 0;       // 32-bit words left in block_
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Distinct sampling purposes get disjoint stream ids for the same replica.
namespace stream_purpose {
constexpr uint64_t kExceedance = 1;
constexpr uint64_t kMcPaths = 2;
constexpr uint64_t kCloud = 3;
constexpr uint64_t kGibbs = 4;
constexpr uint64_t kResample = 5;
constexpr uint64_t kBridgeMc = 6;
constexpr uint64_t kBootstrap = 7;
constexpr uint64_t kReplicaPair = 8;
}  // namespace stream_purpose

inline uint64_t stream_id(uint64_t purpose, uint64_t replica) {
  return (purpose << 56) ^ replica;
}

// Per-site uniform in (0,1): pure function of (seed, replica, n, x, tag).
// Coordinates are folded pairwise for d > 2; n and the first two coordinates
// enter the counter untouched so nearby sites use distinct Philox counters.
double site_uniform(uint64_t seed, uint64_t replica, int64_t n,
                    const int32_t* x, int d, uint32_t tag = 0);

}  // namespace polymerlab
