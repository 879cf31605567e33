// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_PARALLEL_HPP
#define GLINT_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace glint {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(begin, end) over a static partition of [0, count). Each index is
/// visited exactly once by exactly one worker; callers must make per-index
/// writes disjoint so results cannot depend on scheduling.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    const int n = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
    if (n <= 1 || count == 0) {
        body(0, count);
        return;
    }
    const std::size_t chunk = (count + n - 1) / n;
    std::vector<std::thread> pool;
    pool.reserve(n - 1);
    for (int w = 1; w < n; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    body(0, std::min(count, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace glint

#endif
