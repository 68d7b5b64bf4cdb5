#ifndef FLOCKSEL_PARALLEL_HPP
#define FLOCKSEL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace flocksel {

/// Worker count used by parallel_for: FLOCKSEL_THREADS if set, otherwise the
/// hardware concurrency, overridable with set_thread_limit().
std::size_t thread_limit();
void set_thread_limit(std::size_t threads);

/// Calls body(begin, end) over contiguous chunks of [0, n). Each index is
/// handled by exactly one call, so per-index work that does not depend on
/// the chunking gives bitwise identical results for any thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace flocksel

#endif  // FLOCKSEL_PARALLEL_HPP
