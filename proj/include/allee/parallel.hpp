#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace allee {

inline std::size_t default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and `workers`, and no state is shared between chunks.
template <typename Body>
void parallel_chunks(std::size_t n, std::size_t workers, Body&& body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

/// Smallest index in [0, n) for which fails(i) is true, or n if none.
template <typename Pred>
std::size_t parallel_first_failure(std::size_t n, std::size_t workers, Pred&& fails) {
    const std::size_t slots = std::max<std::size_t>(1, std::min(workers, n));
    std::vector<std::size_t> first(slots, n);
    const std::size_t chunk = n == 0 ? 1 : (n + slots - 1) / slots;
    parallel_chunks(n, slots, [&](std::size_t begin, std::size_t end) {
        const std::size_t slot = begin / chunk;
        for (std::size_t i = begin; i < end; ++i) {
            if (fails(i)) {
                first[slot] = i;
                return;
            }
        }
    });
    return *std::min_element(first.begin(), first.end());
}

}  // namespace allee
