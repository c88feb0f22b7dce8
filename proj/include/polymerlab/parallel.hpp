#pragma once
// Deterministic replica sweeps. Each index is independent work keyed by its
// own RNG stream; results land in index-order storage, so the merged output
// is bitwise identical for any worker count (POLYMERLAB_THREADS).

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace polymerlab {

inline int worker_count() {
  if (const char* env = std::getenv("POLYMERLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count) across workers. fn must only touch state
// owned by index i.
inline void parallel_for(int64_t count, const std::function<void(int64_t)>& fn,
                         int workers = 0) {
  if (workers <= 0) workers = worker_count();
  if (workers == 1 || count <= 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  auto drain = [&] {
    for (;;) {
      int64_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

}  // namespace polymerlab
