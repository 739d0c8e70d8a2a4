#pragma once

#include <cstddef>
#include <functional>

namespace qpower {

/// Worker count: QPOWER_THREADS if set and positive, else hardware concurrency.
unsigned thread_limit();

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
/// write into pre-sized slots, so output never depends on scheduling. The
/// first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qpower
