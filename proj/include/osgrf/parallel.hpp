#pragma once

#include <cstddef>
#include <functional>

namespace osgrf {

/// Worker count: OSGRF_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
int thread_count();

/// Calls body(begin, end) on contiguous chunks covering [0, n). Chunk
/// boundaries depend only on n, never on the worker count, so any per-chunk
/// reduction the caller performs afterwards in chunk order is reproducible.
/// Nested calls run serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// As parallel_for, also passing the chunk number to body(chunk, begin, end).
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Number of chunks parallel_for splits [0, n) into, and chunk c's range.
std::size_t chunk_count(std::size_t n);
std::size_t chunk_begin(std::size_t n, std::size_t c);

}  // namespace osgrf
