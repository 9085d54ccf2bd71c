#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lodforge {

/// Worker count: `LODFORGE_THREADS` if set and positive, otherwise the
/// hardware concurrency.
int thread_count();

/// Runs `fn(i)` for i in [0, n) on up to thread_count() threads. Each index is
/// visited exactly once; the first exception thrown is rethrown.
template <class Fn>
void parallel_for(size_t n, Fn&& fn) {
  const size_t workers = std::min<size_t>(size_t(thread_count()), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lodforge
