#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace invclt {

/// Resolves a user thread hint: 0 means "use the hardware concurrency".
inline unsigned resolve_threads(unsigned hint) {
    if (hint != 0) return hint;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(chunk) for chunk in [0, num_chunks) on up to `threads` workers.
/// Each chunk writes only its own result slot, and callers reduce the
/// slots in chunk order, so outputs are independent of the worker count.
template <class Fn>
void for_each_chunk(std::size_t num_chunks, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(num_chunks)));
    if (threads <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t c = next.fetch_add(1); c < num_chunks; c = next.fetch_add(1)) {
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace invclt
