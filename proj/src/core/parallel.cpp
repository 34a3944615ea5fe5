#include "panosr/core/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

namespace panosr {

namespace {
std::atomic<int> g_jobs{static_cast<int>(
    std::max(1u, std::thread::hardware_concurrency()))};
}

int default_jobs() { return g_jobs.load(std::memory_order_relaxed); }

void set_default_jobs(int jobs) {
  g_jobs.store(std::max(1, jobs), std::memory_order_relaxed);
}

void parallel_for(std::int64_t n, int jobs,
                  const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  jobs = static_cast<int>(std::min<std::int64_t>(std::max(1, jobs), n));
  if (jobs == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(jobs) - 1);
  for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace panosr
