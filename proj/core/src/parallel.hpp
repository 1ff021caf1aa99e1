#pragma once

// Internal chunked parallel-for. Thread count comes from RESNETLAB_THREADS,
// falling back to hardware concurrency. Work items must be independent.

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rnl::detail {

inline std::size_t thread_count() {
    if (const char* env = std::getenv("RESNETLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& body) {
    const std::size_t workers = std::min(thread_count(), n ? n : std::size_t{1});
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] {
            for (std::size_t i = b; i < e; ++i) body(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace rnl::detail
