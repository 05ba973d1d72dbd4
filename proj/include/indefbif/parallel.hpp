#pragma once

#include <cstddef>
#include <functional>

namespace indefbif {

/// Upper bound on worker threads used by library loops; 0 means
/// hardware_concurrency. Results never depend on this value.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n), possibly concurrently. body must only
/// write to slot i of preallocated outputs. The first exception thrown by
/// any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace indefbif
