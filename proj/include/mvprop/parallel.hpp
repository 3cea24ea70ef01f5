#pragma once

#include <cstddef>
#include <functional>

namespace mvp {

/// Worker count for parallel_for. 0 restores hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries
/// depend on n only (never on the thread count), so per-chunk results merged
/// in chunk order are reproducible across thread configurations.
void parallel_chunks(size_t n, const std::function<void(size_t, size_t)>& fn);

/// fn(i) for i in [0, n), in parallel.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace mvp
