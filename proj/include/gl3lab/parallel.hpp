#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gl3lab {

// Runs body(begin, end) over contiguous chunks of [0, count). Each index is
// visited exactly once; callers write per-index results and reduce them
// afterwards in a fixed order, which keeps output independent of `threads`.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (count == 0) return;
  const std::size_t workers =
      std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, count);
  if (workers == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gl3lab
