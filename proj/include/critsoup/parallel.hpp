#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace critsoup {

/// Worker count for a requested value; 0 means hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns
/// the results indexed by i. Work is handed out dynamically, but every result
/// lands in its own slot, so the output does not depend on the schedule. The
/// first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, int threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(resolve_threads(threads),
                                                                          static_cast<int>(std::max<std::size_t>(count, 1)))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Splits [0, count) into fixed chunks of `chunk` items and maps
/// fn(begin, end) over them in parallel. Chunk boundaries depend only on
/// `count` and `chunk`, which keeps reductions over the returned vector
/// independent of the number of workers.
template <class Fn>
auto parallel_chunks(std::size_t count, std::size_t chunk, int threads, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}))> {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  return parallel_map(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    return fn(begin, std::min(count, begin + chunk));
  });
}

}  // namespace critsoup
