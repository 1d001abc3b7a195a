// Index-ordered parallel map over independent jobs (verifier cells, seeds).
// Results land in slot i regardless of which worker ran job i, so output is
// identical for every worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace percap {

// Worker count from PERCAP_THREADS, else the hardware concurrency (>= 1).
unsigned worker_count();

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& job, unsigned workers = worker_count()) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned w = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (w <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  // Rethrow the lowest-index failure so the reported error is deterministic.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace percap
