#pragma once

#include <cstddef>
#include <functional>

namespace sparsemob {

/// Runs fn(0) .. fn(n - 1) on up to `workers` threads. Callers write results
/// by index, so output order never depends on scheduling. The exception of
/// the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace sparsemob
