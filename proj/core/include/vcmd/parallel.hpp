#pragma once

#include <cstdint>
#include <functional>

namespace vcmd {

/// Runs fn over [0,n) split into one contiguous chunk per worker.
/// The partition depends only on (n, workers), never on scheduling, and
/// workers <= 1 executes inline on the calling thread.
void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t begin, std::int64_t end)>& fn);

/// Runs fn(k) for k in [0,jobs), distributing jobs over the worker threads.
void parallel_jobs(int jobs, int workers, const std::function<void(int job)>& fn);

} // namespace vcmd
