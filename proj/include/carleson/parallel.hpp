#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace carleson {

// Worker cap: MC_THREADS env var if set, else hardware concurrency.
// Tests can override in-process.
int max_threads();
void set_thread_cap(int cap);  // 0 restores env/hardware behavior

// Runs fn(i) for i in [0, n). Work items must write to disjoint slots;
// callers do any order-sensitive reduction afterwards in fixed index order.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace carleson
