#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace mmot {

// Global worker count for cell-parallel loops. 0 = hardware concurrency.
void set_threads(int n);
int thread_count();

// Static-partition parallel loop over [0, n). The body writes only to its own
// output cells, so results do not depend on the thread count. Reductions are
// done by the callers over fixed chunks to stay bitwise deterministic.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace mmot
