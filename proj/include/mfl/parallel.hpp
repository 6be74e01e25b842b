#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mfl {

namespace detail {
inline std::atomic<int> max_threads_setting{1};
inline thread_local bool in_parallel_region = false;
}  // namespace detail

inline void set_max_threads(int threads) {
  detail::max_threads_setting.store(threads < 1 ? 1 : threads);
}

inline int max_threads() { return detail::max_threads_setting.load(); }

// Static block partition of [0, count) over worker threads. Tasks must write
// to disjoint locations; there is no reduction, so results do not depend on
// the thread count. Nested calls run sequentially.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  if (count <= 0) return;
  const int threads = std::min(max_threads(), count);
  if (threads <= 1 || detail::in_parallel_region) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(size_t(threads));
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < threads; ++w) {
    const int begin = int(std::int64_t(count) * w / threads);
    const int end = int(std::int64_t(count) * (w + 1) / threads);
    pool.emplace_back([&, begin, end] {
      detail::in_parallel_region = true;
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
      detail::in_parallel_region = false;
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mfl
