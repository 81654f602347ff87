#pragma once

#include <cstddef>
#include <functional>

namespace volresp {

/// Worker count: VOLRESP_THREADS if set to a positive integer, else hardware concurrency.
[[nodiscard]] std::size_t thread_count();

/// Runs body(i) for i in [0, n) across thread_count() workers. Each index is visited exactly
/// once; callers write results into per-index slots, so output order never depends on
/// scheduling. The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace volresp
