#pragma once

#include <cstddef>
#include <functional>

namespace threshlab {

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 means
/// hardware concurrency). Each index runs exactly once; if any body throws,
/// the exception of the lowest failing index is rethrown after all finish.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

unsigned default_workers();

}  // namespace threshlab
