#pragma once

#include <cstddef>
#include <functional>

namespace basinscope {

/// Worker count: hardware concurrency, capped by BASINSCOPE_THREADS when set.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on thread_count() threads, split into
/// contiguous blocks. body must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace basinscope
