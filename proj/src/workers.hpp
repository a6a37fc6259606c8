#pragma once

#include <mpfr.h>

#include <thread>
#include <vector>

namespace latmin {

// Calls work(t) for t = 0..threads-1, inline when threads <= 1. Worker threads
// release MPFR's thread-local constant caches before exiting.
template <class Work>
void run_workers(unsigned threads, Work&& work) {
  if (threads <= 1) {
    work(0u);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&work, t] {
      work(t);
      mpfr_free_cache2(MPFR_FREE_LOCAL_CACHE);
    });
}

}  // namespace latmin
