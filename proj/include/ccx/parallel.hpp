#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ccx {

/// Process-wide worker count for the separable sweeps. 0 means "use hardware
/// concurrency". Lines are independent, so results are identical for any
/// setting.
inline std::atomic<int>& thread_count() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) { thread_count().store(n < 0 ? 1 : n); }

template <class F>
void parallel_for(std::size_t count, F&& fn) {
    int workers = thread_count().load();
    if (workers == 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ccx
