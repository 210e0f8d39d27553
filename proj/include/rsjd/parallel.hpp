#pragma once

#include <cstddef>
#include <functional>

namespace rsjd {

/// Worker count: RSJD_THREADS when set, hardware concurrency otherwise.
std::size_t thread_count();

/// Runs body(begin, end) over a partition of [0, n) on up to
/// thread_count() threads. Callers must write results per index (no shared
/// accumulation) so that output is independent of the partitioning.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rsjd
