#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace chainsim {

inline int default_thread_count() {
    if (const char* env = std::getenv("CHAINSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work items must write to disjoint slots; the
// schedule never affects results because streams are seeded per index.
template <typename Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(static_cast<std::size_t>(threads), n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace chainsim
