#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace divctl {

/// Worker count: hardware concurrency capped by the DIVCTL_THREADS env var.
inline int max_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("DIVCTL_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

/// Chunked parallel loop over [0, n).  The body must be safe to run
/// concurrently for distinct indices; callers keep determinism by writing
/// per-index slots and reducing sequentially afterwards.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
    if (n <= 0) return;
    const int workers = std::min<std::int64_t>(max_threads(), n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::int64_t chunk = std::max<std::int64_t>(1, n / (workers * 8));
    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::int64_t lo = next.fetch_add(chunk);
            if (lo >= n) return;
            const std::int64_t hi = std::min(n, lo + chunk);
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace divctl
