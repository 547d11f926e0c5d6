#ifndef FAMA_PARALLEL_HPP
#define FAMA_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fama {

inline constexpr const char* workers_env = "FAMA_WORKERS";

// FAMA_WORKERS if set and positive, otherwise the hardware thread count
inline unsigned default_workers() {
    if (const char* v = std::getenv(workers_env)) {
        try {
            const long n = std::stol(v);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline unsigned resolve_workers(unsigned requested) { return requested == 0 ? default_workers() : requested; }

// Runs fn(i) for i in [0, n) on up to `workers` threads and returns the results
// in index order, so any reduction over them is schedule independent.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, unsigned workers, F&& fn) {
    std::vector<R> out(n);
    workers = std::max(1u, std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_lock;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_lock);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace fama

#endif
