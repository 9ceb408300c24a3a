#pragma once

#include <cstddef>
#include <functional>

namespace muprobe {

/// Worker count from MU_PROBE_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers (0 = worker_count()).
/// Results must be written by index; the first exception thrown is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace muprobe
