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

namespace spectral_lab {

/// Worker count: hardware concurrency, capped by SPECTRAL_LAB_THREADS when set.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPECTRAL_LAB_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
    }
  }
  return hw;
}

/// Calls fn(i) for i in [0, n). Callers write results into slot i, so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& fn, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!err) err = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace spectral_lab
