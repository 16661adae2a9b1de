#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace stefan {

// Particle work is split into fixed-size blocks.  Workers claim blocks through
// an atomic cursor and write partial results into a slot indexed by block id;
// callers merge the slots in block order afterwards.  Reductions are therefore
// bitwise independent of the worker count.
inline constexpr std::int64_t kParticleBlock = 4096;

inline int block_count(std::int64_t n) {
  return static_cast<int>((n + kParticleBlock - 1) / kParticleBlock);
}

struct BlockRange {
  std::int64_t begin;
  std::int64_t end;
};

inline BlockRange block_range(int block, std::int64_t n) {
  std::int64_t b = static_cast<std::int64_t>(block) * kParticleBlock;
  std::int64_t e = b + kParticleBlock;
  return {b, e < n ? e : n};
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(block) for block = 0..n_blocks-1 on up to n_threads workers.
// body must touch only state owned by its block.
inline void for_each_block(int n_blocks, int n_threads, const std::function<void(int)>& body) {
  n_threads = resolve_threads(n_threads);
  if (n_threads <= 1 || n_blocks <= 1) {
    for (int b = 0; b < n_blocks; ++b) body(b);
    return;
  }
  std::atomic<int> cursor{0};
  auto worker = [&] {
    for (;;) {
      int b = cursor.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      body(b);
    }
  };
  std::vector<std::thread> pool;
  int n_workers = n_threads < n_blocks ? n_threads : n_blocks;
  pool.reserve(static_cast<std::size_t>(n_workers - 1));
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace stefan
