#pragma once

#include <cstddef>
#include <functional>

namespace specluster {

/// Worker count: hardware concurrency, capped by SPECLUSTER_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = worker_count()).
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace specluster
