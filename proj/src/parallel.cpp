#include "mmot/parallel.hpp"

namespace mmot {

namespace {
int g_threads = 1;
}

void set_threads(int n) {
  if (n <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    g_threads = hc == 0 ? 1 : static_cast<int>(hc);
  } else {
    g_threads = n;
  }
}

int thread_count() { return g_threads; }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
  const int workers = std::min<std::int64_t>(g_threads, std::max<std::int64_t>(1, n));
  if (workers <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mmot
