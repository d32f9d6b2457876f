#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qcae {

inline int resolve_threads(int requested, int n_items) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  const int t = requested > 0 ? requested : hw;
  return std::max(1, std::min(t, n_items));
}

// Runs fn(0..n-1) across up to n_threads workers. Callers must make fn(i)
// write only to slot i of preallocated output so results are independent of
// scheduling; any reduction happens afterwards in index order.
inline void parallel_for(int n, int n_threads,
                         const std::function<void(int)>& fn) {
  n_threads = resolve_threads(n_threads, n);
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace qcae
