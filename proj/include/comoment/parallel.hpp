#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace comoment {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Index range [0,n) is split into fixed-size chunks that do not depend on
// the worker count; per-chunk states are folded in chunk order on one
// thread. Results are therefore bit-identical for any number of threads.
inline constexpr std::uint64_t kChunkSize = 1u << 16;

template <class State, class Fill, class Merge>
State chunked_reduce(std::uint64_t n, const State& init, Fill fill, Merge merge,
                     unsigned threads = 0) {
  unsigned nt = resolve_threads(threads);
  std::uint64_t nchunks = (n + kChunkSize - 1) / kChunkSize;
  if (nchunks <= 1) {
    State acc = init;
    if (n > 0) fill(acc, std::uint64_t{0}, n);
    return acc;
  }
  // Even a single worker goes through per-chunk states: the chunk/merge
  // structure must not depend on the thread count or the folded bits would.
  std::vector<State> parts(nchunks, init);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      std::uint64_t lo = c * kChunkSize;
      std::uint64_t hi = lo + kChunkSize < n ? lo + kChunkSize : n;
      fill(parts[c], lo, hi);
    }
  };
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  State acc = parts[0];
  for (std::uint64_t c = 1; c < nchunks; ++c) merge(acc, parts[c]);
  return acc;
}

// Evaluate body(i) for i in [0,n); each index writes only its own outputs,
// so the filled buffers do not depend on scheduling.
template <class Body>
void parallel_for_index(std::uint64_t n, Body body, unsigned threads = 0) {
  unsigned nt = resolve_threads(threads);
  std::uint64_t nchunks = (n + kChunkSize - 1) / kChunkSize;
  if (nchunks <= 1 || nt == 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      std::uint64_t lo = c * kChunkSize;
      std::uint64_t hi = lo + kChunkSize < n ? lo + kChunkSize : n;
      for (std::uint64_t i = lo; i < hi; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace comoment
