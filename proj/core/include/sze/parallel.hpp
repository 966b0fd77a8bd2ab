#pragma once

#include <cstddef>
#include <functional>

namespace sze {

/// Upper bound on worker threads used by library kernels. 0 means one per
/// hardware thread. Results never depend on this value.
void set_thread_limit(std::size_t threads);
std::size_t thread_limit();

/// Calls body(i) for every i in [0, count). Each index is visited exactly
/// once; bodies must only write to slots owned by their index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sze
