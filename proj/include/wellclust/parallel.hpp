#pragma once

#include <cstddef>
#include <functional>

namespace wellclust {

/// Worker count: WELLCLUST_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each index
/// is processed exactly once; callers write results to per-index slots so the
/// outcome does not depend on scheduling. The exception from the lowest failing
/// index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wellclust
