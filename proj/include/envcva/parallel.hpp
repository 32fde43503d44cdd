#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace envcva {

// Worker count from ENVCVA_THREADS, else the hardware concurrency.
std::size_t worker_count();

// Splits [0, n) into contiguous blocks and runs fn(begin, end) on a bounded
// pool. Callers write only to slots owned by their range.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_block = 256) {
    const std::size_t workers = std::min(worker_count(), (n + min_block - 1) / std::max<std::size_t>(min_block, 1));
    if (workers <= 1) {
        if (n > 0) fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace envcva
