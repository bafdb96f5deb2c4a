#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace hawkes {

inline std::size_t default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs `simulate(i)` for i in [0, n) on `threads` workers and feeds the results to
/// `consume(i, result)` strictly in index order, batch by batch. Aggregates built in `consume`
/// are therefore independent of the thread count. The first exception (by index) is rethrown.
template <class Result, class Simulate, class Consume>
void run_indexed(std::size_t n, std::size_t threads, Simulate&& simulate, Consume&& consume,
                 std::size_t batch = 512) {
    threads = std::max<std::size_t>(threads, 1);
    std::vector<std::optional<Result>> results;
    std::vector<std::exception_ptr> errors;
    for (std::size_t begin = 0; begin < n; begin += batch) {
        const std::size_t end = std::min(n, begin + batch);
        results.assign(end - begin, std::nullopt);
        errors.assign(end - begin, nullptr);
        std::atomic<std::size_t> next{begin};
        auto worker = [&] {
            for (std::size_t i = next++; i < end; i = next++) {
                try {
                    results[i - begin].emplace(simulate(i));
                } catch (...) {
                    errors[i - begin] = std::current_exception();
                }
            }
        };
        const std::size_t workers = std::min(threads, end - begin);
        if (workers <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        }
        for (std::size_t i = begin; i < end; ++i) {
            if (errors[i - begin]) std::rethrow_exception(errors[i - begin]);
            consume(i, std::move(*results[i - begin]));
        }
    }
}

}  // namespace hawkes
