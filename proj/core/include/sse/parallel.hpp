#pragma once

#include <cstddef>
#include <functional>

namespace sse {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 or 1 runs
/// inline). Indices are claimed dynamically; the first exception by index
/// order is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Worker count from SSE_LAB_THREADS, else hardware concurrency (at least 1).
unsigned threads_from_env();

}  // namespace sse
