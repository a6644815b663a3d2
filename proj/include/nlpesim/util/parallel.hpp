#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace nlpesim {

inline int resolve_threads(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static chunking over [0, n). Each worker owns a contiguous index range and
// must only write its own slots; callers combine results in index order, so
// output is independent of the thread count.
template <typename Fn>
void parallel_for_chunks(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0)
        return;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nthreads <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace nlpesim
