// Copyright 2026 The spot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spot {

/// Execution lane for the data-parallel kernels. Every kernel has a plain
/// serial loop kept as the reference implementation; the parallel lane must
/// produce bit-identical output (tests/test_parallel_consistency.cpp).
enum class Exec { serial, parallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// under that contract the two lanes are bit-identical.
template <class F>
void parallel_for(std::int64_t n, Exec exec, F&& body) {
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

/// Deterministic map-reduce: the range is cut into fixed-size chunks, each
/// chunk is accumulated serially into its own state, and the chunk states are
/// merged in chunk order. The result does not depend on the thread count.
///
/// make()            -> Acc        fresh accumulator
/// chunk(acc, b, e)  accumulates [b, e)
/// merge(total, acc) folds one chunk state into the running total
template <class Acc, class MakeFn, class ChunkFn, class MergeFn>
Acc chunked_reduce(std::int64_t n, std::int64_t chunk_size, Exec exec,
                   MakeFn&& make, ChunkFn&& chunk, MergeFn&& merge) {
  if (chunk_size < 1) chunk_size = 1;
  const std::int64_t num_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Acc> partial;
  partial.reserve(static_cast<std::size_t>(num_chunks));
  for (std::int64_t c = 0; c < num_chunks; ++c) partial.push_back(make());

  parallel_for(num_chunks, exec, [&](std::int64_t c) {
    const std::int64_t b = c * chunk_size;
    const std::int64_t e = std::min(n, b + chunk_size);
    chunk(partial[static_cast<std::size_t>(c)], b, e);
  });

  Acc total = make();
  for (std::int64_t c = 0; c < num_chunks; ++c)
    merge(total, partial[static_cast<std::size_t>(c)]);
  return total;
}

}  // namespace spot
