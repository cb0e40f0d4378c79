#pragma once

#include <cstddef>
#include <functional>

namespace lbs {

/// Worker count: the hardware concurrency, capped by LB_SPECTRA_THREADS when
/// that is set and positive.
int worker_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` threads with a static
/// contiguous partition. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace lbs
