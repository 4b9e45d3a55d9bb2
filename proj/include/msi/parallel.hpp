#pragma once

#include <cstddef>
#include <functional>

namespace msi {

// Global worker cap (CLI --threads). 0 = hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(chunk_index, begin, end) over [0, total) split into fixed-size
// chunks. Chunking depends only on `total`, never on the thread count, so
// per-chunk partial results reduced in chunk order are bit-stable across
// thread counts. fn must only write to chunk-owned state.
void parallel_chunks(size_t total, size_t chunk_size,
                     const std::function<void(size_t, size_t, size_t)>& fn);

// Convenience: chunk count target ~64, minimum chunk 1024 elements.
size_t default_chunk(size_t total);

}  // namespace msi
