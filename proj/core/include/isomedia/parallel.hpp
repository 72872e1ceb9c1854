// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace isomedia {

// Worker count: ISOMEDIA_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int default_thread_count();

// Splits [0, n) into `threads` contiguous chunks of near-equal size and runs
// fn(chunk_index, begin, end) for each, chunk 0 on the calling thread. The
// partition depends only on n and threads, so per-chunk results merged in
// chunk order are reproducible.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(int chunk, std::size_t begin, std::size_t end)>& fn);

}  // namespace isomedia
