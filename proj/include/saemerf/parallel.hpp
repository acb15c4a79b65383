#ifndef SAEMERF_PARALLEL_HPP
#define SAEMERF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace saemerf {

// Process-wide worker budget. 0 means "use hardware_concurrency".
inline std::atomic<int>& max_threads_slot() {
  static std::atomic<int> slot{0};
  return slot;
}

inline void set_max_threads(int n) { max_threads_slot().store(n); }

inline int max_threads() {
  int n = max_threads_slot().load();
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Runs fn(i) for i in [0, count). Results must be written to per-index
// slots; the loop body must not depend on execution order. The first
// exception thrown by any worker is rethrown on the calling thread.
// threads <= 0 uses the process-wide budget; threads == 1 runs inline.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = max_threads();
  threads = static_cast<int>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace saemerf

#endif  // SAEMERF_PARALLEL_HPP
