#pragma once

#include <cstddef>

#include <functional>

namespace abm {

// Worker count resolution: explicit request capped by the ABM_EVI_THREADS
// environment variable (when set to a positive integer), which in turn
// defaults to the hardware concurrency. requested <= 0 means "use the cap".
int resolved_threads(int requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed through an atomic counter; each item must write only to its own
// output slot so that results are independent of the thread count. Exceptions
// from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace abm
