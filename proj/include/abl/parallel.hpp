#ifndef ABL_PARALLEL_HPP
#define ABL_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace abl {

// Global worker count.  ABL_THREADS overrides hardware concurrency; command
// line configuration can override both via set_num_threads.
inline int& thread_count_ref() {
    static int n = [] {
        if (const char* env = std::getenv("ABL_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc ? static_cast<int>(hc) : 1;
    }();
    return n;
}

inline int num_threads() { return thread_count_ref(); }
inline void set_num_threads(int n) { if (n > 0) thread_count_ref() = n; }

// Static block partition of [0, n).  Deterministic: the chunk layout depends
// only on n and the configured thread count, never on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    int nt = std::min<std::size_t>(num_threads(), n ? n : 1);
    if (nt <= 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

// Deterministic parallel reduction: fixed chunking, partials summed in chunk
// order so repeated runs produce bit-identical results.
template <class F>
double parallel_sum(std::size_t n, F&& term) {
    int nt = std::min<std::size_t>(num_threads(), n ? n : 1);
    std::size_t nchunks = nt <= 1 ? 1 : 4 * static_cast<std::size_t>(nt);
    nchunks = std::min(nchunks, n ? n : 1);
    std::size_t chunk = (n + nchunks - 1) / nchunks;
    std::vector<double> partial(nchunks, 0.0);
    parallel_for(nchunks, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
            double s = 0;
            for (std::size_t i = lo; i < hi; ++i) s += term(i);
            partial[c] = s;
        }
    });
    double total = 0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace abl

#endif
