#include "harnacklab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace harnack {

unsigned thread_count() {
  if (const char* env = std::getenv("HARNACKLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const unsigned t = thread_count();
  constexpr std::size_t min_chunk = 4096;
  if (t <= 1 || n < 2 * min_chunk) {
    body(0, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(t, n / min_chunk);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::jthread> workers;
  workers.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t b = c * step, e = std::min(n, b + step);
    if (b < e) workers.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, std::min(n, step));
}

}  // namespace harnack
