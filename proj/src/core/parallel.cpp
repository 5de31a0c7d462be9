#include "landau/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace landau {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_threads() {
  static const std::size_t value = [] {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LANDAU_THREADS")) {
      try {
        const long n = std::stol(env);
        if (n >= 1) return std::min<std::size_t>(static_cast<std::size_t>(n), hw);
      } catch (...) {
      }
    }
    return hw;
  }();
  return value;
}

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load();
  return o > 0 ? o : env_threads();
}

void set_thread_count(std::size_t count) { g_override.store(count); }

void parallel_for(std::size_t count, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  grain = std::max<std::size_t>(1, grain);
  const std::size_t workers = std::min(thread_count(), (count + grain - 1) / grain);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  const std::size_t blocks = (count + grain - 1) / grain;
  const std::size_t per = (blocks + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * per * grain);
    const std::size_t end = std::min(count, (w + 1) * per * grain);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace landau
