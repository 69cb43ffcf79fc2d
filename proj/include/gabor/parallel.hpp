#pragma once
#include <thread>
#include <vector>

namespace gabor::detail {

/// Runs fn(i) for i in [0, n), split into contiguous chunks across `threads`
/// workers. Serial when threads <= 1. Callers own any reduction; chunked
/// index order keeps reductions deterministic.
template <class Fn>
inline void parallel_for(long n, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n < 2 * threads) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = t * chunk;
        long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn]() {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace gabor::detail
