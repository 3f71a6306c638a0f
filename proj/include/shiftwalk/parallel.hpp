#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace shiftwalk {

// Default worker count: SHIFTWALK_THREADS env var if set, else hardware
// concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("SHIFTWALK_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}

// Static block partition of [0, n). Work items must derive their randomness
// from their own index so results do not depend on the partitioning.
inline void parallel_for(size_t n, int threads,
                         const std::function<void(size_t, size_t)>& body) {
  if (threads <= 1 || n < 2) {
    body(0, n);
    return;
  }
  size_t nt = std::min<size_t>(threads, n);
  std::vector<std::thread> pool;
  size_t chunk = (n + nt - 1) / nt;
  for (size_t t = 0; t < nt; ++t) {
    size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace shiftwalk
