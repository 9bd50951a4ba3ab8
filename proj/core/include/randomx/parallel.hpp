#pragma once

#include <cstddef>
#include <functional>

namespace randomx {

/// Worker count from an explicit request, else RANDOMX_EVAL_THREADS, else the
/// hardware concurrency. Always at least 1.
std::size_t resolve_threads(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; callers write results into slot i so the outcome
/// never depends on scheduling. The exception from the lowest failing index is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace randomx
