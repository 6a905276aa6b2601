#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "xtreval/types.hpp"

namespace xtreval {

/// Worker count actually used: a positive request as-is, otherwise the
/// hardware concurrency (at least 1).
inline int effective_workers(int requested) {
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) across `workers` threads with a static block
/// partition (workers < 1 means hardware concurrency). Each task must write
/// only to its own output slot; results are then independent of the worker
/// count.
template <class Fn>
void parallel_for(Index n, int workers, Fn&& fn) {
  if (n <= 0) return;
  workers = effective_workers(workers);
  if (workers == 1 || n == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }

  const Index nthreads = std::min<Index>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  std::exception_ptr error;
  std::mutex error_mutex;

  const Index chunk = (n + nthreads - 1) / nthreads;
  for (Index t = 0; t < nthreads; ++t) {
    const Index begin = t * chunk;
    const Index end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (Index i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace xtreval
