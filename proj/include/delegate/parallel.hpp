#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace delegate {

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls body(block_index, begin, end) for each contiguous block of [0, count).
/// Blocks are claimed by up to `workers` threads; callers that write results
/// into per-block slots and reduce them in block order get output that does
/// not depend on the worker count.
inline void parallel_for_blocks(std::size_t count, std::size_t block_size,
                                const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                                unsigned workers = default_workers()) {
  if (count == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t blocks = (count + block_size - 1) / block_size;
  auto run = [&](std::size_t b) { body(b, b * block_size, std::min(count, (b + 1) * block_size)); };
  if (workers <= 1 || blocks == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
    return;
  }

  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t b;
      {
        std::lock_guard lock(mu);
        if (next >= blocks || error) return;
        b = next++;
      }
      try {
        run(b);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace delegate
