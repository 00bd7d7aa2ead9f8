#pragma once

#include <cstddef>
#include <functional>

namespace fohs {

// Worker count: FOHS_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, count). Each index is visited exactly once; the
// first exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace fohs
