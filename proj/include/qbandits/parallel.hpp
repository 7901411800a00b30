#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qbandits {

// Runs fn(block_index, begin, end) over [0, count) split into fixed-size
// blocks. Blocks are handed out dynamically but are identified by index, so
// callers that key their RNG streams and result slots on the block index get
// output independent of the worker count. The first exception thrown by fn
// is rethrown after all workers stop.
inline void parallel_blocks(std::int64_t count, std::int64_t block_size, int jobs,
                            const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
    if (count <= 0) return;
    if (block_size <= 0) block_size = 1;
    const std::int64_t num_blocks = (count + block_size - 1) / block_size;
    if (jobs <= 1 || num_blocks == 1) {
        for (std::int64_t b = 0; b < num_blocks; ++b) {
            const std::int64_t begin = b * block_size;
            fn(b, begin, std::min(begin + block_size, count));
        }
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= num_blocks || failed.load()) break;
            const std::int64_t begin = b * block_size;
            try {
                fn(b, begin, std::min(begin + block_size, count));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };
    const int n_threads = static_cast<int>(std::min<std::int64_t>(jobs, num_blocks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace qbandits
