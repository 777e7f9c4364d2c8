#pragma once

// Index-parallel loops with results stored per index, so reductions done by
// the caller in index order are independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace grasspinch {

/// Worker count: GRASSPINCH_THREADS if set to a positive integer, else the
/// number of logical cores.
inline int worker_count() {
  if (const char* env = std::getenv("GRASSPINCH_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count). The first failing index (lowest) rethrows.
template <class Fn>
void parallel_for(int count, Fn&& fn, int workers = worker_count()) {
  workers = std::max(1, std::min(workers, count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failedIndex = count;
  std::exception_ptr failure;
  auto body = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failedIndex) {
          failedIndex = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <class T, class Fn>
std::vector<T> parallel_map(int count, Fn&& fn, int workers = worker_count()) {
  std::vector<T> out(count);
  parallel_for(count, [&](int i) { out[i] = fn(i); }, workers);
  return out;
}

}  // namespace grasspinch
