#include "rmirt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace rmirt {

namespace {

std::atomic<int> g_threads{0};

constexpr std::size_t kScatterChunks = 8;

int hardware_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void set_num_threads(int n) { g_threads = std::max(0, n); }

int num_threads() noexcept {
  const int n = g_threads.load();
  return n > 0 ? n : hardware_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
}

void deterministic_scatter(
    std::size_t n_items, std::span<double> out,
    const std::function<void(std::size_t, std::span<double>)>& body) {
  std::fill(out.begin(), out.end(), 0.0);
  if (n_items == 0) return;
  const std::size_t chunks = std::min(kScatterChunks, n_items);
  if (chunks == 1 || num_threads() == 1) {
    // Same chunk layout as the threaded path keeps sums bit-identical.
    std::vector<double> buf(out.size());
    for (std::size_t c = 0; c < chunks; ++c) {
      std::fill(buf.begin(), buf.end(), 0.0);
      const std::size_t lo = c * n_items / chunks;
      const std::size_t hi = (c + 1) * n_items / chunks;
      for (std::size_t i = lo; i < hi; ++i) body(i, buf);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += buf[k];
    }
    return;
  }
  std::vector<std::vector<double>> bufs(chunks, std::vector<double>(out.size()));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * n_items / chunks;
    const std::size_t hi = (c + 1) * n_items / chunks;
    for (std::size_t i = lo; i < hi; ++i) body(i, bufs[c]);
  });
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += bufs[c][k];
}

}  // namespace rmirt
