#pragma once

#include <cstddef>
#include <functional>

namespace loclim {

// Number of workers to use. requested == 0 means hardware concurrency.
// The LOCLIM_THREADS environment variable caps the result.
unsigned worker_count(unsigned requested = 0);

// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
// handled exactly once; callers write into slot i so results do not depend
// on the schedule. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace loclim
