#pragma once

#include <cstddef>
#include <functional>

namespace nfmimo
{
    // Worker count: NFMIMO_THREADS if set to a positive integer, otherwise the hardware concurrency.
    std::size_t thread_count();

    // Calls fn(i) for every i in [0, n), split into contiguous blocks across thread_count() workers.
    // Results must be written to per-index slots; reductions happen afterwards in index order.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);
}
