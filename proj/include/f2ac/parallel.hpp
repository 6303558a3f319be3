#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace f2ac {

/// Worker count used by internally parallel loops. Initialized from the
/// F2AC_THREADS environment variable (default 1). Never affects results.
int thread_count();
void set_thread_count(int threads);

/// Runs body(chunk_begin, chunk_end) over a static partition of [begin, end).
/// Chunk boundaries depend only on the range and the thread count, and every
/// index is visited exactly once.
template <class Body>
void parallel_chunks(std::size_t begin, std::size_t end, Body&& body, std::size_t min_chunk = 1024) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), (total + min_chunk - 1) / min_chunk);
  if (threads <= 1) {
    body(begin, end);
    return;
  }
  const std::size_t step = (total + threads - 1) / threads;
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = begin + t * step;
    const std::size_t hi = std::min(end, lo + step);
    workers.emplace_back([&, t, lo, hi] {
      try {
        if (lo < hi) body(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Number of chunks parallel_chunks would use; lets callers preallocate
/// per-chunk accumulators for a deterministic ordered reduction.
std::size_t chunk_count(std::size_t total, std::size_t min_chunk = 1024);

}  // namespace f2ac
