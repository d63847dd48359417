#include "mixncut/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace mixncut {

namespace {

std::atomic<unsigned> g_thread_cap{0};
thread_local bool t_in_worker = false;

unsigned hardware_threads() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

void set_max_threads(unsigned count) noexcept { g_thread_cap = count; }

unsigned max_threads() noexcept {
  const unsigned cap = g_thread_cap.load();
  return cap == 0 ? hardware_threads() : cap;
}

void parallel_for_blocks(
    std::size_t n, std::size_t min_block,
    const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  min_block = std::max<std::size_t>(min_block, 1);
  const std::size_t workers =
      t_in_worker ? 1
                  : std::min<std::size_t>(max_threads(),
                                          (n + min_block - 1) / min_block);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t block = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t begin = w * block;
      const std::size_t end = std::min(n, begin + block);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        t_in_worker = true;
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    const bool was_worker = t_in_worker;
    t_in_worker = true;
    try {
      body(0, std::min(n, block));
    } catch (...) {
      errors[0] = std::current_exception();
    }
    t_in_worker = was_worker;
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mixncut
