#pragma once

#include <cstddef>
#include <functional>

namespace gprd {

/// Thread cap from GPRD_THREADS, defaulting to the hardware concurrency.
std::size_t thread_limit();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Items are
/// independent; callers write results into per-index slots so output order does
/// not depend on scheduling. The first exception thrown by any item is
/// rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_limit());

}  // namespace gprd
