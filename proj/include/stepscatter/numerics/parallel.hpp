#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stepscatter::numerics {

/// Resolves a requested thread count: 0 means STEPSCATTER_THREADS if set,
/// otherwise the hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEPSCATTER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over [0, count) split into blocks whose boundaries
/// are multiples of `align`. Blocks write disjoint outputs, so results do not
/// depend on the thread count.
template <class Body>
void parallel_blocks(std::size_t count, std::size_t align, unsigned threads, Body&& body) {
  if (count == 0) return;
  const std::size_t blocks = (count + align - 1) / align;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), blocks));
  if (workers == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b0 = blocks * w / workers;
    const std::size_t b1 = blocks * (w + 1) / workers;
    pool.emplace_back([&, b0, b1] {
      try {
        body(b0 * align, std::min(count, b1 * align));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stepscatter::numerics
