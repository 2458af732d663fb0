#pragma once
/* Slot-indexed parallel map: work items write only their own slot, so the
 * assembled result is independent of scheduling.  On exceptions the
 * lowest-index one is rethrown, again independent of timing. */

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace fsforge {

template <class Fn>
void parallel_for_slots(int n, int jobs, Fn&& fn) {
  if (n <= 0) return;
  if (jobs < 1) jobs = 1;
  if (jobs > n) jobs = n;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fsforge
