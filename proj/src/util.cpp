#include "hofa/util.hpp"

#include <cstdlib>

namespace hofa {

unsigned worker_threads() {
    static unsigned n = [] {
        if (const char* env = std::getenv("HOFA_THREADS")) {
            long v = std::strtol(env, nullptr, 10);
            if (v >= 1 && v <= 256) return (unsigned)v;
        }
        return 1u;
    }();
    return n;
}

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body_range) {
    unsigned w = worker_threads();
    if (w <= 1 || n <= 1) {
        body_range(0, n);
        return;
    }
    if (w > n) w = (unsigned)n;
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (unsigned t = 0; t < w; t++) {
        size_t lo = n * t / w, hi = n * (t + 1) / w;
        threads.emplace_back([&body_range, lo, hi] { body_range(lo, hi); });
    }
    for (auto& th : threads) th.join();
}

}  // namespace hofa
