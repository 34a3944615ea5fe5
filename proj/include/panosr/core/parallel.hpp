#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace panosr {

// Process-wide default worker count, set once by the CLI --jobs flag.
int default_jobs();
void set_default_jobs(int jobs);

// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
// so results are independent of scheduling. jobs <= 1 runs inline.
void parallel_for(std::int64_t n, int jobs,
                  const std::function<void(std::int64_t)>& fn);

inline void parallel_for(std::int64_t n,
                         const std::function<void(std::int64_t)>& fn) {
  parallel_for(n, default_jobs(), fn);
}

}  // namespace panosr
