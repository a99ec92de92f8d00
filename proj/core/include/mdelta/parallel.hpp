#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mdelta {

// Worker count: MDELTA_THREADS when set and positive, otherwise the hardware
// concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, count) over a static partition of worker_count()
// threads. Results must be written to per-index slots; callers reduce them in
// index order so output never depends on the thread count. The first
// exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Pairwise sum in a fixed association order.
double pairwise_sum(const double* values, std::size_t count);
inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(values.data(), values.size());
}

}  // namespace mdelta
