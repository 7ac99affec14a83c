#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace oscbound {

// Runs fn(0..n-1), optionally on worker threads. Callers keep determinism by
// writing results into index-addressed slots and reducing in fixed order.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    int k = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace oscbound
