#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riskgov {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs f(i) for i in [0, n) on contiguous chunks. Results may only be written
// to disjoint, index-addressed slots, which keeps the outcome independent of
// the worker count.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = resolve_threads(threads);
  if (threads > n) threads = n > 0 ? n : 1;
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_chunk = [&](int begin, int end) {
    try {
      for (int i = begin; i < end; ++i) f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const int chunk = (n + threads - 1) / threads;
  for (int w = 1; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(run_chunk, begin, end);
  }
  run_chunk(0, std::min(n, chunk));
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace riskgov
