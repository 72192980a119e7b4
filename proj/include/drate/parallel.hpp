#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace drate::parallel {

// Index-parallel loop over independent tasks. Tasks write into
// preallocated slots keyed by index, so outputs are identical for any
// thread budget; the first exception wins and is rethrown after join.
inline void parallel_for(std::size_t tasks, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads < 2 || tasks < 2) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  const auto workers = static_cast<std::size_t>(threads) < tasks
                           ? static_cast<std::size_t>(threads)
                           : tasks;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> bail{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!bail.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= tasks) break;
        try {
          fn(i);
        } catch (...) {
          {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!first_error) first_error = std::current_exception();
          }
          bail.store(true, std::memory_order_relaxed);
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace drate::parallel
