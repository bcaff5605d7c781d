#pragma once

#include <cstddef>
#include <functional>

namespace ldvqr {

/// Worker count: LDVQR_THREADS when set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned worker_threads();

/// Runs fn(i) for i in [0,n) on worker_threads() threads. Results must be
/// written to index-addressed slots so the outcome is schedule independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ldvqr
