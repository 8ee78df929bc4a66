#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dowave {

/// Splits [begin, end) into at most `threads` contiguous chunks and runs
/// body(chunk_begin, chunk_end) on each. The calling thread takes the first chunk.
/// Work inside one index is never split, so results do not depend on `threads`
/// as long as the body writes disjoint outputs per index.
template <typename Body>
void parallel_for(std::size_t begin, std::size_t end, std::size_t threads, Body&& body) {
    const std::size_t count = end > begin ? end - begin : 0;
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads <= 1) {
        if (count > 0) body(begin, end);
        return;
    }
    const std::size_t chunk = (count + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) {
        const std::size_t b = begin + t * chunk;
        const std::size_t e = std::min(end, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, t, b, e] {
            try {
                body(b, e);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    try {
        body(begin, std::min(end, begin + chunk));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace dowave
