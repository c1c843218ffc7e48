#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace aperiodica {

// Thread cap: APERIODICA_THREADS env var, else hardware, at most 8.
inline int thread_cap() {
  if (const char* env = std::getenv("APERIODICA_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Runs fn(chunk_index, begin, end) over [0, n) split into contiguous
// chunks. Chunk boundaries are independent of the thread count, so any
// per-chunk results merge deterministically.
inline void parallel_chunks(long long n,
                            const std::function<void(int, long long, long long)>& fn) {
  int threads = thread_cap();
  if (n <= 0) return;
  int chunks = std::min<long long>(threads * 4, std::max<long long>(1, n));
  long long step = (n + chunks - 1) / chunks;
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c)
      fn(c, c * step, std::min<long long>(n, (c + 1) * step));
    return;
  }
  std::vector<std::thread> pool;
  std::vector<int> next(1, 0);
  std::mutex mu;
  auto worker = [&]() {
    while (true) {
      int c;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next[0] >= chunks) return;
        c = next[0]++;
      }
      fn(c, c * step, std::min<long long>(n, (c + 1) * step));
    }
  };
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace aperiodica
