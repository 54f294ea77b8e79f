#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oldroyd {

/// Calls task(i) for i in [0, n) on up to `workers` threads. Tasks must write
/// only to their own slots; the first exception is rethrown after all threads join.
template <class Task>
void parallel_for(std::size_t n, int workers, Task&& task) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace oldroyd
