#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kle {

/// KLE_THREADS if set to a positive integer, else the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("KLE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over fixed chunks of [0, n) on up to `threads`
/// workers and returns the per-chunk results in chunk order.
///
/// Chunk boundaries depend only on n and chunk_size, so an in-order merge of
/// the results is identical for every thread count.
template <class Body>
auto parallel_chunks(std::size_t n, std::size_t chunk_size, unsigned threads, Body body)
    -> std::vector<decltype(body(std::size_t{}, std::size_t{}))> {
  using Result = decltype(body(std::size_t{}, std::size_t{}));
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Result> results(n_chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        const std::size_t begin = c * chunk_size;
        results[c] = body(begin, std::min(n, begin + chunk_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
      }
    }
  };

  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), n_chunks));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace kle
