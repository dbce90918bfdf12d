#ifndef WAVEMEM_PARALLEL_HPP
#define WAVEMEM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace wavemem {

/// Worker count: WAVEMEM_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

/// Runs fn(0..n-1) across `threads` workers (0 = default). Indices are
/// striped so any worker count yields the same per-index work; callers are
/// expected to write results into index-addressed slots and reduce in index
/// order, which keeps outputs independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

} // namespace wavemem

#endif
