#pragma once

#include <cstddef>
#include <functional>

namespace harnack {

/// Worker count: HARNACKLAB_THREADS when set, otherwise hardware concurrency.
unsigned thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the thread count; bodies must not share mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace harnack
