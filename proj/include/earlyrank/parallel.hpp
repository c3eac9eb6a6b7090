#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace earlyrank {

/// Runs fn(i) for i in [0, n) over contiguous ranges. fn must only write state owned by index i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2 * static_cast<std::size_t>(workers)) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace earlyrank
