#pragma once

#include <functional>

namespace twistbound {

/// Process-wide worker count for batch operations (0 = hardware concurrency).
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [begin, end) over a static partition of the range.
/// Each index is handled exactly once and results must be written to
/// per-index slots, so the outcome is independent of scheduling.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace twistbound
