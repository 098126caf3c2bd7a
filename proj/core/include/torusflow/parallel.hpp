#pragma once

#include <cstddef>
#include <functional>

namespace torusflow {

/// Worker count for batch jobs: TORUSFLOW_THREADS if set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
int worker_count();

/// Runs job(i) for i in [0, count) on up to worker_count() threads. Jobs must
/// write only to their own slot; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job);

}  // namespace torusflow
