#pragma once

#include <cstddef>
#include <functional>

namespace slmulti {

/// Worker cap from SLMULTI_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(k) for k in [0, n). Each index is handled exactly once, so
/// results written per index do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace slmulti
