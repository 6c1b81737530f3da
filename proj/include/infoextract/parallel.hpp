#pragma once

#include <cstddef>
#include <functional>

namespace infoextract {

/// Caps worker threads used by parallel_* helpers; 0 restores the
/// hardware default.
void set_thread_limit(unsigned n);

unsigned effective_threads();

/// Runs fn(chunk_index, begin, end) over a fixed chunk grid
/// [0,count) in chunks of chunk_size. The grid depends only on count and
/// chunk_size, never on the thread count, so callers that reduce per-chunk
/// results in chunk order get thread-count-independent answers.
void parallel_chunks(std::size_t count, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Runs fn(i) for i in [0,count); units must be independent.
void parallel_indices(std::size_t count,
                      const std::function<void(std::size_t)>& fn);

}  // namespace infoextract
