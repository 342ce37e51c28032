#pragma once

#include <cstddef>
#include <functional>

namespace fcmarket {

// Calls body(i) for i in [0, n) on up to `jobs` threads. Work is handed out
// by index, so results written to slot i do not depend on the thread count.
// The first exception thrown by any call is rethrown after all threads stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// Hardware concurrency, at least 1.
int default_jobs();

}  // namespace fcmarket
