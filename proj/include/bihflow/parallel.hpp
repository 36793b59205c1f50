#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace bihflow {

/// Process-wide worker count used by the sample sweeps and center scans.
/// Defaults to 1; the CLI sets it from --threads.
void set_thread_count(int threads);
int thread_count() noexcept;

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; reductions are done by the caller afterwards in index order, so the
/// result does not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace bihflow
