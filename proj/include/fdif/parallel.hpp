#pragma once

#include <functional>

namespace fdif {

/// Number of worker threads: hardware concurrency capped by the FDIF_THREADS
/// environment variable (values < 1 mean serial).
int worker_threads();

/// Runs fn(begin, end) over a partition of [0, n). Chunks are contiguous and
/// writes must be disjoint; results do not depend on the partition.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace fdif
