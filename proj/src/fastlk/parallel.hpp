// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <thread>
#include <utility>
#include <vector>

namespace fastlk {

/// Resolves a requested worker count; 0 (or negative) selects the hardware
/// default.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Number of chunks parallel_chunks() will use for n items.
inline int chunk_count(int n, int threads) {
  if (n <= 0) return 0;
  return std::min(resolve_threads(threads), n);
}

// Splits [0, n) into contiguous chunks and runs fn(chunk, begin, end) on one
// worker thread per chunk (inline when a single chunk suffices). Every index
// is processed exactly once. Callers must write to disjoint slots, or merge
// per-chunk partials with an order-free operation (integer sums, extremum
// under a total order), so results do not depend on the schedule or on the
// thread count.
template <typename Fn>
void parallel_chunks(int n, int threads, Fn&& fn) {
  const int workers = chunk_count(n, threads);
  if (workers <= 0) return;
  if (workers == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int base = n / workers;
  const int extra = n % workers;
  int begin = 0;
  for (int c = 0; c < workers; ++c) {
    const int end = begin + base + (c < extra ? 1 : 0);
    pool.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    begin = end;
  }
  for (auto& t : pool) t.join();
}

}  // namespace fastlk
