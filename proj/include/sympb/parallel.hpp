#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sympb::detail {

  /**
   * Runs ``fn(i)`` for i in [0, count) on up to ``workers`` threads with a static block split. Callers write results
   * by index, so the output never depends on the worker count. The first exception thrown is rethrown.
   */
  template <typename Fn>
  void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
      for (std::size_t i = 0; i < count; ++i) {
        fn(i);
      }
      return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t lo = w * block;
      std::size_t hi = std::min(count, lo + block);
      if (lo >= hi) {
        break;
      }
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) {
            fn(i);
          }
        } catch (...) {
          std::lock_guard lock(guard);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
  }

}  // namespace sympb::detail
