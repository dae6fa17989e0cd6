#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fadesim {

unsigned default_workers();

// Splits [0, count) into fixed-size chunks and runs fn(begin, end, chunk) on up to
// `workers` threads. Chunk boundaries do not depend on the worker count, so callers
// that merge per-chunk results in chunk order get identical output for any count.
template <class Fn>
void for_each_chunk(std::uint64_t count, std::uint64_t chunk_size, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  const std::uint64_t chunks = (count + chunk_size - 1) / chunk_size;
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::min<std::uint64_t>(chunks, 1024))));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t b = c * chunk_size;
        fn(b, std::min(count, b + chunk_size), c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fadesim
