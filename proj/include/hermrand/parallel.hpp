#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hermrand {

/// Runs fn(i) for i in [0, n) on `jobs` threads. Work is handed out in
/// chunks from a shared counter; callers write results by index, so the
/// output never depends on the thread count. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn, std::size_t chunk = 1) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const std::size_t start = next.fetch_add(chunk);
      if (start >= n) return;
      try {
        for (std::size_t i = start; i < std::min(n, start + chunk); ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hermrand
