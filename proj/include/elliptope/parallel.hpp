#pragma once

#include <functional>

namespace elliptope {

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// ELLIPTOPE_THREADS environment variable when it is set and positive.
int resolve_threads(int requested);

/// Runs fn(0..count-1) on up to `threads` workers. Each index is handled by
/// exactly one worker, so writes into per-index slots stay race-free and the
/// overall result does not depend on scheduling. The first exception thrown
/// by any worker is rethrown after the pool joins.
void parallel_for(int count, const std::function<void(int)>& fn, int threads);

}  // namespace elliptope
