#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace w2w {

inline int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; each
// index writes only its own outputs, so results do not depend on the
// worker count or on scheduling. The first exception thrown (by lowest
// chunk) is rethrown on the caller's thread.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    int w = std::max(1, workers);
    w = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), n));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w) - 1);
    auto run_chunk = [&](int t) {
        std::size_t lo = n * static_cast<std::size_t>(t) / static_cast<std::size_t>(w);
        std::size_t hi = n * (static_cast<std::size_t>(t) + 1) / static_cast<std::size_t>(w);
        try {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
    };
    for (int t = 1; t < w; ++t) threads.emplace_back(run_chunk, t);
    run_chunk(0);
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace w2w
