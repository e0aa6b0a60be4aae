#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace gubm::detail {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over disjoint slices of [0, n). Results must not depend
// on the slicing; callers keep determinism by giving each index its own
// output slot or by reducing fixed-size blocks in index order afterwards.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (n == 0) return;
  if (workers <= 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t span = static_cast<std::size_t>(workers);
  const std::size_t chunk = (n + span - 1) / span;
  std::vector<std::thread> threads;
  threads.reserve(span);
  for (std::size_t w = 0; w < span; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : threads) t.join();
}

}  // namespace gubm::detail
