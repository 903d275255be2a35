#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geosugg {

/// Runs body(i) for i in [0, n) over at most `threads` workers using
/// contiguous chunks. Callers must only write to per-index slots so the
/// result does not depend on the worker count. The first exception thrown
/// by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (n + workers - 1) / workers;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace geosugg
