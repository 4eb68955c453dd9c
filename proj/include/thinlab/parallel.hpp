#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace thinlab {

// Worker count: explicit argument wins, then THINLAB_THREADS, then 1.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THINLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

// Splits [0, n) into contiguous chunks, one worker per chunk.
// fn(chunk_index, begin, end) must not touch another chunk's data.
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n ? n : 1)));
    if (workers == 1 || n == 0) {
        fn(0, 0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, w, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace thinlab
