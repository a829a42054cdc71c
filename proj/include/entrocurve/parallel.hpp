#pragma once
// Index-parallel loops with deterministic results: every index writes only
// its own output slot, and the first exception (by index) is rethrown.

#include <cstddef>
#include <functional>

namespace entrocurve {

// ENTROCURVE_THREADS if set and positive, else the hardware concurrency (>= 1).
int thread_count();

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace entrocurve
