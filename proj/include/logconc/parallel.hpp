#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace logconc {

// Splits [0, n) into one contiguous block per worker and runs fn(begin, end)
// on each.  Results must not depend on the partition; callers guarantee that
// by deriving all randomness from per-index substreams.  The first exception
// is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t w = workers <= 1
                      ? 1
                      : std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (w == 1) {
    fn(0, n);
    return;
  }
  std::size_t block = (n + w - 1) / w;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t i = 0; i < w; ++i) {
    std::size_t b = i * block, e = std::min(n, b + block);
    if (b >= e) continue;
    threads.emplace_back([&fn, &errors, i, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace logconc
