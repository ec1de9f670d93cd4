#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mfs {

/// Worker count used by parallel_for. Defaults to 1; the CLI sets it from
/// --threads.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, count). Items are handed out dynamically but each
/// writes only its own slot, so results never depend on the worker count.
/// The first exception (lowest index) is rethrown after all workers join.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mfs
