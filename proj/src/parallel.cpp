#include "mvprop/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace mvp {

namespace {
int g_threads = 0;

int effective_threads() {
  if (g_threads > 0) return g_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }
int thread_count() { return effective_threads(); }

void parallel_chunks(size_t n, const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  const int workers = effective_threads();
  // Chunk size depends on n only so boundaries match across thread counts.
  const size_t chunk = std::max<size_t>(1, (n + 255) / 256);
  const size_t n_chunks = (n + chunk - 1) / chunk;
  if (workers == 1 || n_chunks == 1) {
    for (size_t c = 0; c < n_chunks; ++c) fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min<size_t>(workers, n_chunks) - 1;
  pool.reserve(spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  parallel_chunks(n, [&](size_t b, size_t e) {
    for (size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace mvp
