#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace qcdiff {

/// Static block partition of [0, n) over `threads` workers. Work items must
/// not share mutable state; results are written to per-index slots, so the
/// outcome is independent of the thread count.
inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, n > 0 ? n : 1);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    const int begin = static_cast<int>(static_cast<long>(n) * w / threads);
    const int end = static_cast<int>(static_cast<long>(n) * (w + 1) / threads);
    pool.emplace_back([begin, end, &fn] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace qcdiff
