#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace qflab {

// Worker cap from QFLAB_THREADS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("QFLAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls fn(i) for i in [0, count) across up to `workers` threads. Callers
// write results into slot i, so output order never depends on scheduling.
// The exception from the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, int workers = worker_count()) {
  if (count == 0) return;
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nthreads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qflab
