#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace modalbridge {

/// Worker count: MODALBRIDGE_THREADS if set and positive, else the hardware concurrency.
int worker_count();

/// Overrides worker_count() for the calling process; 0 restores the default.
void set_worker_count(int workers) noexcept;

/// Runs body(i) for i in [begin, end) on up to worker_count() threads. Each index
/// must write only to its own outputs; the first exception thrown is rethrown.
template <class Body>
void parallel_for(std::int64_t begin, std::int64_t end, Body&& body) {
    const std::int64_t total = end - begin;
    if (total <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), total));
    if (workers <= 1) {
        for (std::int64_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (std::int64_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// SplitMix64 finaliser, used to turn (seed, stream) pairs into engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for stream k of a seeded run: mt19937_64 seeded with splitmix64(seed ^ k).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ stream));
}

}  // namespace modalbridge
