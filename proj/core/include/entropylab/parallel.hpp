#pragma once

#include <functional>

namespace elab {

// Worker count: ENTROPYLAB_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() threads with static
// contiguous chunks. The first exception thrown by any call is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace elab
