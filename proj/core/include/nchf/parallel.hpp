#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nchf {

/// Worker count: NCHF_THREADS if set and positive, otherwise the hardware
/// concurrency. Read once per process.
int thread_count();

/// Overrides the worker count for the rest of the process (tests use this to
/// compare thread settings inside one binary). Values < 1 restore the default.
void set_thread_count(int threads);

/// Splits [0, n) into contiguous chunks and calls fn(begin, end) on each.
/// Chunk boundaries never influence results: callers write disjoint outputs
/// and reduce afterwards in a fixed order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(thread_count());
  constexpr std::size_t kMinChunk = 4096;
  if (workers <= 1 || n < 2 * kMinChunk) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min(workers, n / kMinChunk);
  const std::size_t per = (n + chunks - 1) / chunks;
  // Exceptions are rethrown in chunk order once every worker has joined.
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks - 1);
    for (std::size_t k = 1; k < chunks; ++k) {
      const std::size_t begin = k * per;
      const std::size_t end = std::min(n, begin + per);
      if (begin >= end) break;
      pool.emplace_back([&fn, &errors, k, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    try {
      fn(std::size_t{0}, std::min(n, per));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nchf
