// parallel.hpp: bounded worker pool for independent batch runs (kappa and
// detuning sweeps). Results come back in input order.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kerrcat {

/// Default worker count: hardware concurrency, at least 1.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(inputs[i]) for every i using at most `workers` threads. The first
/// exception thrown by any call is rethrown after all workers finish.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, Fn fn, unsigned workers = 0) {
    using Out = decltype(fn(inputs.front()));
    std::vector<Out> out(inputs.size());
    if (inputs.empty()) return out;
    if (workers == 0) workers = default_workers();
    workers = std::min<unsigned>(workers, static_cast<unsigned>(inputs.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
            try {
                out[i] = fn(inputs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace kerrcat
