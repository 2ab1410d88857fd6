#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace netvol {

/// Runs fn(i) for i in [0, n) on `jobs` threads. Results must be written by
/// fn into pre-sized storage indexed by i; the index order of that storage
/// is what makes parallel runs deterministic.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    int t = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    threads.reserve(static_cast<std::size_t>(t));
    for (int k = 0; k < t; ++k) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
}

inline int hardware_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace netvol
