#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace hyperbc {

/// Work partitioning for Monte Carlo loops. The chunk size, not the thread
/// count, fixes which random stream each draw uses, so results are identical
/// for any number of threads.
struct ParallelOptions {
  std::size_t chunk_size = 16384;
  unsigned threads = 0;  // 0: hardware concurrency

  [[nodiscard]] unsigned resolved_threads() const {
    if (threads != 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
  }
};

/// Runs f(chunk, begin, end) for every chunk of [0, n) and returns the
/// results in chunk order. f must only touch state owned by its chunk.
template <class R, class F>
std::vector<R> run_chunks(std::size_t n, const ParallelOptions& opts, F&& f) {
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<std::optional<R>> slots(chunks);
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(opts.resolved_threads(), chunks));
  auto body = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    slots[c].emplace(f(c, begin, end));
  };
  auto collect = [&] {
    std::vector<R> results;
    results.reserve(chunks);
    for (auto& slot : slots) results.push_back(std::move(*slot));
    return results;
  };
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return collect();
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          body(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = chunks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return collect();
}

/// run_chunks followed by an in-order merge of the chunk accumulators.
template <class Acc, class F>
Acc reduce_chunks(std::size_t n, const ParallelOptions& opts, Acc init, F&& f) {
  auto parts = run_chunks<Acc>(n, opts, std::forward<F>(f));
  for (auto& part : parts) init.merge(part);
  return init;
}

}  // namespace hyperbc
