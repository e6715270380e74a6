#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace argox {

/// Run fn(0..n-1) on up to `jobs` threads. Callers write results into
/// preallocated slots, so output is deterministic regardless of
/// scheduling. The first exception is rethrown after all workers join.
inline void parallel_for(long n, int jobs, const std::function<void(long)>& fn) {
    if (n <= 0) return;
    jobs = std::clamp<int>(jobs, 1, static_cast<int>(std::min<long>(n, 1024)));
    if (jobs == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                long i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace argox
