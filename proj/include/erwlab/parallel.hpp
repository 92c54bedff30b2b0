#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erwlab {

inline int effective_workers(int requested) {
    if (requested >= 1) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over disjoint chunks of [0, n) claimed from an atomic
// counter. Every item writes only to its own output slot, so the result is
// identical for any worker count and any claiming order; only wall time
// changes. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for_chunks(std::int64_t n, int workers, std::int64_t chunk, Fn&& fn) {
    workers = effective_workers(workers);
    if (chunk < 1) chunk = 1;
    if (n <= 0) return;
    if (workers == 1 || n <= chunk) {
        fn(std::int64_t{0}, n);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
            if (begin >= n) return;
            const std::int64_t end = std::min(begin + chunk, n);
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Per-item flavor; chunking is picked to keep claim traffic low.
template <typename Fn>
void parallel_for(std::int64_t n, int workers, Fn&& fn) {
    workers = effective_workers(workers);
    const std::int64_t chunk = std::max<std::int64_t>(1, n / (static_cast<std::int64_t>(workers) * 64));
    parallel_for_chunks(n, workers, chunk, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace erwlab
