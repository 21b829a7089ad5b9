// Minimal fixed thread pool. Work is split into index ranges; every output
// element is written by exactly one task, so results do not depend on the
// thread count.
#pragma once

#include <cstddef>
#include <functional>

namespace fgforge {

// Number of worker threads the pool runs with. Reads FGFORGE_THREADS once
// (clamped to [1, 64]); defaults to min(hardware_concurrency, 8).
int thread_budget();

// Runs fn(begin, end) over a partition of [0, n). Blocks until done.
// Serial when n is small, the budget is 1, or when called from inside a
// worker (no nested parallelism). Exceptions from tasks are rethrown.
void parallel_ranges(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Convenience wrapper: fn(i) for each i in [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fgforge
