#pragma once
// Disorder slabs. A slab is the i.i.d. field eta_{n,x} on the reachable
// lattice H_d = {(n,x): 1 <= n <= N, |x|_inf <= n, n = |x|_1 mod 2}.
//
// Two backings share one interface:
//   * keyed  -- values are a pure function of (seed, replica, site) via the
//               counter RNG; any site is materializable in O(1), so large
//               slabs are never stored.
//   * dense  -- an explicit site->eta map (loaded from disk, or built by
//               tests, e.g. "eta on a chosen set, 0 elsewhere").
//
// For partition functions that depend only on the rare high sites
// {1+eta >= threshold}, sample_exceedances draws exactly that sparse set
// (same law, different coupling than the keyed field; see README notes).

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "polymerlab/rng.hpp"
#include "polymerlab/tail_law.hpp"

namespace polymerlab {

constexpr int kMaxDim = 4;

struct LatticeSite {
  int64_t n = 0;
  int32_t x[kMaxDim] = {0, 0, 0, 0};
  double eta = 0.0;
};

// Sites per layer / in a window with |x|_inf <= min(n, radius) and parity.
int64_t layer_site_count(int64_t n, int d, int64_t radius);
int64_t window_site_count(int64_t N, int d, int64_t radius);

// Lexicographic enumeration (n ascending, then coordinates); used by
// serialization and the exceedance scan.
void for_each_site(int64_t N, int d, int64_t radius,
                   const std::function<void(int64_t, const int32_t*)>& fn);

class EnvSlab {
 public:
  static EnvSlab keyed(const TailLaw& law, int64_t N, int d, uint64_t seed,
                       uint64_t replica = 0);
  // Explicit values; sites absent from `values` carry default_eta.  The
  // seed/replica labels are provenance only (kept through serialization).
  static EnvSlab from_values(const TailLaw& law, int64_t N, int d,
                             std::vector<LatticeSite> values,
                             double default_eta = 0.0, uint64_t seed = 0,
                             uint64_t replica = 0);

  int64_t N() const { return N_; }
  int d() const { return d_; }
  const TailLaw& law() const { return law_; }
  uint64_t seed() const { return seed_; }
  uint64_t replica() const { return replica_; }
  bool is_keyed() const { return keyed_; }

  // eta at a reachable site (checked: range and parity).
  double eta(int64_t n, const int32_t* x) const;

  // All sites within |x|_inf <= min(n, radius), lexicographic order.
  std::vector<LatticeSite> materialize(int64_t radius) const;

  // Sites with 1 + eta >= threshold within the window (scan of the field;
  // shares the slab's realization).
  std::vector<LatticeSite> scan_exceedances(double threshold,
                                            int64_t radius) const;

 private:
  EnvSlab() : law_(TailLaw::make(TailFamily::pareto, 0.5)) {}
  TailLaw law_;
  int64_t N_ = 0;
  int d_ = 1;
  bool keyed_ = true;
  uint64_t seed_ = 0;
  uint64_t replica_ = 0;
  std::unordered_map<uint64_t, double> values_;
  double default_eta_ = 0.0;

  friend uint64_t pack_site(int64_t n, const int32_t* x, int d);
};

uint64_t pack_site(int64_t n, const int32_t* x, int d);

// Site <-> lexicographic index within a window (d <= 2). Build once per
// (N, d, radius); lookups are O(log N).
class WindowIndex {
 public:
  WindowIndex(int64_t N, int d, int64_t radius);
  int64_t N() const { return N_; }
  int d() const { return d_; }
  int64_t radius() const { return radius_; }
  int64_t total() const { return prefix_.back(); }
  LatticeSite site_at(int64_t index) const;

 private:
  int64_t N_;
  int d_;
  int64_t radius_;
  std::vector<int64_t> prefix_;  // prefix_[n] = sites in layers 1..n
};

// Exact sample of the exceedance set {(n,x): 1+eta >= threshold} in the
// window, by geometric index skips through the lexicographic site order.
// Marks are drawn from the conditional tail. Equal in law to scanning a
// keyed slab, but a different coupling.
std::vector<LatticeSite> sample_exceedances(const TailLaw& law,
                                            const WindowIndex& window,
                                            double threshold, uint64_t seed,
                                            uint64_t replica);

}  // namespace polymerlab
