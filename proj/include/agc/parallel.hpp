#pragma once

#include <cstddef>
#include <functional>

namespace agc {

// Worker count: AGC_THREADS if set, else hardware concurrency.
std::size_t default_threads();

// Runs fn(i) for i in [0, count) on up to `threads` threads. Each index is
// handled exactly once; the first exception is rethrown after all workers
// stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

}  // namespace agc
