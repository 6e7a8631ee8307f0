#pragma once
// Deterministic parallel path batches: work items are indexed, every item
// derives its randomness from (seed, index) alone, so results are identical
// for any thread count.

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ssmp {

inline void parallel_paths(long n, int threads,
                           const std::function<void(long)>& fn) {
  if (n <= 0) return;
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  threads = static_cast<int>(std::min<long>(threads, n));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace ssmp
