#ifndef RASM_PARALLEL_HPP
#define RASM_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rasm {

// Worker cap: RASM_THREADS if set (minimum 1), otherwise hardware concurrency.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("RASM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/**
 * Runs f(i) for i in [0, n).  f must only touch state owned by index i;
 * callers fold results in index order afterwards, so output is identical
 * to the serial run regardless of the worker count.
 */
template <class F>
void parallel_for(std::size_t n, F&& f) {
    unsigned workers = thread_cap();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace rasm

#endif
