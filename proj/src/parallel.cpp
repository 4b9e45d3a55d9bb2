#include "msi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace msi {

namespace {
int g_max_threads = 0;
}

void set_max_threads(int n) { g_max_threads = n < 0 ? 0 : n; }

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

size_t default_chunk(size_t total) {
  size_t chunk = (total + 63) / 64;
  return std::max<size_t>(chunk, 1024);
}

void parallel_chunks(size_t total, size_t chunk_size,
                     const std::function<void(size_t, size_t, size_t)>& fn) {
  if (total == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const size_t n_chunks = (total + chunk_size - 1) / chunk_size;
  const int workers = std::min<size_t>(max_threads(), n_chunks);

  if (workers <= 1) {
    for (size_t c = 0; c < n_chunks; ++c)
      fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
    return;
  }

  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace msi
