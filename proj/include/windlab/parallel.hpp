#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "windlab/rng.hpp"

namespace windlab {

// Runs fn(i) for i in [0, count) on a small thread pool.  Each index must
// own its output slot; scheduling order does not affect results.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn)
{
    unsigned workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// Splits `total` work items over `streams` fixed chunks.
inline std::size_t chunk_begin(std::size_t total, std::size_t streams, std::size_t s)
{
    return total * s / streams;
}

} // namespace windlab
