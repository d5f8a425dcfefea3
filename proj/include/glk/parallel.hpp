#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace glk {

/// Runs fn(k) for k in [0, count) on up to `jobs` threads. Work items must
/// write to disjoint outputs; the first exception thrown is rethrown.
template <class Fn>
void parallel_for(long count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (long k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (long k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const long threads = std::min<long>(jobs, count);
  for (long t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace glk
