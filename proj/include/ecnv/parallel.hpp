#pragma once

#include <cstddef>
#include <functional>

namespace ecnv {

/// Pool size: ECNV_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = thread_count()).
/// Work is handed out dynamically; callers write results to slot i so the
/// outcome does not depend on the schedule. The first exception thrown by any
/// task is rethrown after all workers have stopped.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace ecnv
