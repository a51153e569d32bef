#pragma once

// Fixed-partition parallel loops. Work is split into a number of chunks that does not
// depend on the thread count, and results are combined in chunk order, so output is
// identical for any number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace symtwist {

inline unsigned& worker_threads() {
  static unsigned n = 1;
  return n;
}

inline void set_worker_threads(unsigned n) { worker_threads() = std::max(1U, n); }

/// Runs body(chunk) for chunk = 0..chunks-1 on up to worker_threads() threads.
template <class Body>
void parallel_chunks(std::size_t chunks, Body&& body) {
  const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), chunks));
  if (nt <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          body(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace symtwist
