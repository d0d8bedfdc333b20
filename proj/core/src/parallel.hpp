#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mixtopo::detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on up to `threads` workers with static
// interleaved assignment. Results must be written to per-index slots so the
// caller's reduction order stays fixed. The exception from the lowest failing
// index is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::mutex mu;
    std::exception_ptr first_error;
    std::size_t first_index = count;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (i < first_index) {
                            first_index = i;
                            first_error = std::current_exception();
                        }
                        return;
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mixtopo::detail
