#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "vfn/errors.hpp"

namespace vfn::runtime {

namespace detail {
inline std::atomic<int>& thread_count() {
    static std::atomic<int> n{1};
    return n;
}
}  // namespace detail

/// Worker count for the matrix kernels. 1 (the default) runs every kernel
/// serially in its fixed reference order.
inline void set_threads(int n) {
    if (n < 1) throw ConfigError("threads: count must be >= 1");
    detail::thread_count().store(n);
}

inline int threads() { return detail::thread_count().load(); }

/// Fork-join over [begin, end). Each index is processed by exactly one
/// worker and the chunk split depends only on (range, thread count), so
/// per-element results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, const Fn& fn) {
    const std::int64_t n = end - begin;
    const int workers = std::min<std::int64_t>(threads(), n);
    if (workers <= 1) {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = begin + w * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace vfn::runtime
