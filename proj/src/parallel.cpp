#include "carleson/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace carleson {

namespace {
int g_cap = 0;
}

void set_thread_cap(int cap) { g_cap = cap < 0 ? 0 : cap; }

int max_threads() {
    if (g_cap > 0) return g_cap;
    if (const char* env = std::getenv("MC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(max_threads(), n));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto body = [&] {
        for (;;) {
            std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

}  // namespace carleson
