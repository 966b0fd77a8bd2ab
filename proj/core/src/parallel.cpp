#include "sze/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sze {
namespace {

std::atomic<std::size_t> g_thread_limit{0};
// Nested calls from a worker run inline instead of spawning more threads.
thread_local bool t_inside_worker = false;

std::size_t effective_threads() {
  std::size_t limit = g_thread_limit.load();
  if (limit == 0) limit = std::max(1u, std::thread::hardware_concurrency());
  return limit;
}

}  // namespace

void set_thread_limit(std::size_t threads) { g_thread_limit.store(threads); }

std::size_t thread_limit() { return effective_threads(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = t_inside_worker ? 1 : std::min(effective_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    const bool outer = t_inside_worker;
    t_inside_worker = true;
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
    t_inside_worker = outer;
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sze
