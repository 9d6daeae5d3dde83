#pragma once

#include <cstddef>
#include <functional>

namespace prszz::parallel {

// Runs fn(0..count-1) on up to `jobs` worker threads. Blocks until done.
// The first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

int default_jobs();

} // namespace prszz::parallel
