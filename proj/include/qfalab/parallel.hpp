#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qfalab {

/// Worker count: hardware concurrency capped by the QFA_LAB_THREADS
/// environment variable (values < 1 are ignored).
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QFA_LAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, unsigned(cap));
    }
    return n;
}

/// Runs fn(chunk_index, begin, end) over [0, total) split into contiguous
/// chunks, one worker thread per chunk. Chunk boundaries depend only on
/// (total, chunks), so reductions indexed by chunk are deterministic.
inline void parallel_chunks(std::size_t total,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                            unsigned max_workers = 0) {
    if (total == 0) return;
    unsigned workers = max_workers ? std::min(max_workers, worker_count()) : worker_count();
    workers = unsigned(std::min<std::size_t>(workers, total));
    if (workers <= 1) {
        fn(0, 0, total);
        return;
    }
    const std::size_t base = total / workers, rem = total % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t begin = 0;
    for (unsigned c = 0; c < workers; ++c) {
        const std::size_t len = base + (c < rem ? 1 : 0);
        pool.emplace_back(fn, c, begin, begin + len);
        begin += len;
    }
    for (auto& t : pool) t.join();
}

}  // namespace qfalab
