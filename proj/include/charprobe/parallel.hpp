#pragma once

#include <cstddef>
#include <functional>

namespace charprobe {

// Worker cap: CHARPROBE_THREADS when set, otherwise the logical core count.
size_t worker_count();

// Runs fn(0..n-1) across workers. fn must be safe to call concurrently for
// distinct indices; any exception is rethrown on the calling thread.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace charprobe
