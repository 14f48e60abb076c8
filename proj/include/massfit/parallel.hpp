#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace massfit {

// Worker cap: MASSFIT_THREADS env var, else hardware concurrency.
inline int max_threads() {
  if (const char* env = std::getenv("MASSFIT_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? (int)hw : 1;
}

// Runs fn(i) for i in [0, n). Work is split in contiguous index blocks so any
// per-index output written by the caller stays in deterministic order.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  int workers = std::min<size_t>(max_threads(), n);
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    size_t lo = (size_t)w * chunk;
    size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace massfit
