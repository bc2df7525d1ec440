#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace coordlab {

// Runs f(0..count-1) across `threads` workers and returns results in index
// order, so the outcome is identical to a serial run regardless of
// scheduling. Exceptions are captured and rethrown after all workers join.
template <typename F>
auto parallel_map(size_t count, int threads, F&& f)
    -> std::vector<decltype(f(size_t{0}))> {
  using R = decltype(f(size_t{0}));
  std::vector<R> results(count);
  if (count == 0) return results;
  if (threads <= 1 || count == 1) {
    for (size_t i = 0; i < count; ++i) results[i] = f(i);
    return results;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) break;
      try {
        results[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };
  const size_t nworkers = std::min<size_t>(static_cast<size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  for (size_t t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace coordlab
