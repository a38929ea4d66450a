#pragma once

#include <cstdint>
#include <functional>

namespace koss {

// Process-wide worker pool. Thread count defaults to hardware_concurrency and
// can be capped once at startup (CLI --threads). parallel_for partitions
// [begin, end) into contiguous blocks; work must not depend on which thread
// runs which block. Reductions that need a fixed order must accumulate into
// per-index storage and fold sequentially afterwards.
void set_thread_cap(int threads);
int thread_count();

void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t, int64_t)>& body);

// Convenience: one call per index.
void parallel_for_each(int64_t begin, int64_t end, const std::function<void(int64_t)>& body);

}  // namespace koss
