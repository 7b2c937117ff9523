#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ortest::detail {

/// Number of worker threads for a request of `threads` (0 = hardware).
inline unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs `work(chunk, begin, end)` over [0, total) split into fixed-size
/// chunks and returns the per-chunk results in chunk order. Chunk boundaries
/// depend only on `total` and `chunk_size`, so a caller that seeds each chunk
/// from its index gets the same answer for any thread count.
template <typename Result, typename Work>
std::vector<Result> chunked(std::uint64_t total, std::uint64_t chunk_size, unsigned threads,
                            Work&& work) {
  chunk_size = std::max<std::uint64_t>(chunk_size, 1);
  const std::uint64_t chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<Result> results(chunks);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(chunks, 1)));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t begin = c * chunk_size;
        results[c] = work(c, begin, std::min(total, begin + chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace ortest::detail
