// parallel.hpp - fixed-partition parallel loop.
//
// Work is split into contiguous index chunks and every index is written by
// exactly one worker, so results do not depend on the thread count.

#pragma once

#include <cstddef>
#include <functional>

namespace collective {

// Number of workers: COLLECTIVE_MODE_THREADS if set to a positive integer,
// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

// Calls body(i) for every i in [0, n). Small loops run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace collective
