#ifndef XDISK_PARALLEL_HPP
#define XDISK_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace xdisk {

/// Thread cap honored by all batch drivers. Reads XRAY_NUM_THREADS once;
/// values < 1 or an unset variable fall back to the hardware count.
inline int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("XRAY_NUM_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return cached;
}

/// Run fn(i) for i in [0, n). Work items must not share mutable state.
template <typename Fn>
void parallel_for(long n, Fn&& fn) {
    const int nt = static_cast<int>(std::min<long>(max_threads(), n));
    if (nt <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace xdisk

#endif
