#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace secdsc {

// Worker count: SECDSC_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("SECDSC_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
// write results into per-index slots and reduce in index order, so output
// does not depend on scheduling. The first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace secdsc
