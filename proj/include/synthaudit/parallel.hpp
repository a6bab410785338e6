#pragma once

#include <cstddef>
#include <functional>

namespace synthaudit {

// Runs fn(i) for i in [0, n) across up to `threads` workers (0 = hardware
// concurrency). Each index is processed exactly once; workers own disjoint
// contiguous blocks, so writes to per-index slots need no synchronization and
// results cannot depend on the degree of parallelism. The first exception
// thrown by fn is rethrown on the calling thread.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace synthaudit
