#pragma once

#include <cstddef>
#include <functional>

namespace labelmend {

// Worker cap: LABELMEND_THREADS if set, else hardware concurrency.
int max_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; callers that
// reduce floating-point results do so afterwards in index order so the
// outcome is identical at any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace labelmend
