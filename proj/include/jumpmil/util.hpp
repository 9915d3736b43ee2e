#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

namespace jumpmil {

// Shortest-exact formatting for doubles; %.17g round-trips every value and
// is locale-independent, which the byte-identical artifact contract needs.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string fmt_g(double x, int prec) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    return buf;
}

// Runs body(i) for i in [0, count). Each index must write only to its own
// output slot; results are then reduced by the caller in index order, so the
// outcome is independent of the thread count.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
        const std::size_t lo = k * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace jumpmil
