#pragma once

#include <cstddef>
#include <functional>

namespace okdrop {

/// Worker count: OKDROP_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunk
/// boundaries depend only on count and the worker count, so callers that
/// reduce per-chunk partials in chunk order get reproducible results.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace okdrop
