#pragma once

#include <future>
#include <thread>
#include <vector>

namespace dendrite {

/// Maps fn over [0, n) concurrently and returns results in index order, so
/// output is deterministic regardless of scheduling.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (n <= 1 || hw == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::future<void>> workers;
    std::atomic<std::size_t> next{0};
    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    workers.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
        workers.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
        }));
    }
    for (auto& f : workers) f.get(); // propagates the first exception
    return out;
}

} // namespace dendrite
