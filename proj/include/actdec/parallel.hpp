#pragma once

#include <cstdint>
#include <functional>

namespace actdec {

// Worker count from ACTDEC_WORKERS, else hardware concurrency; always >= 1.
int default_worker_count();

// Runs fn(chunk_index) for every index in [0, num_chunks) on up to `workers`
// threads. Chunk functions must not touch shared mutable state; callers get
// determinism by making each chunk's result a pure function of its index and
// merging results in index order afterwards.
void parallel_for_chunks(std::int64_t num_chunks, int workers,
                         const std::function<void(std::int64_t)>& fn);

}  // namespace actdec
