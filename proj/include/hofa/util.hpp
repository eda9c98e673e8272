#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "hofa/rational.hpp"

namespace hofa {

// Seeded PRNG.  Reduction is done by plain modulo so that sequences are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }
    // uniform in [0, n)
    uint64_t below(uint64_t n) { return n ? eng_() % n : 0; }
    // uniform in [lo, hi] inclusive
    long long range(long long lo, long long hi) { return lo + (long long)below((uint64_t)(hi - lo + 1)); }
    double unit() { return (eng_() >> 11) * 0x1.0p-53; }
    Rat rat_in_unit(long long max_den = 16) {
        long long d = range(1, max_den);
        return Rat(range(0, d), d);
    }

private:
    std::mt19937_64 eng_;
};

// Number of worker threads: HOFA_THREADS if set, else 1.
unsigned worker_threads();

// Index-parallel loop; results must be written to disjoint slots so that
// the outcome is independent of the thread count.
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body_range);

// Sum of f(i) for i in [0, n), accumulated in index order per block and
// folded in block order (deterministic for any thread count).
template <class T, class F>
T parallel_sum(size_t n, T zero, F&& f) {
    unsigned w = worker_threads();
    if (w <= 1 || n < 1024) {
        T acc = zero;
        for (size_t i = 0; i < n; i++) acc += f(i);
        return acc;
    }
    size_t blocks = w * 4;
    std::vector<T> partial(blocks, zero);
    parallel_for(blocks, [&](size_t b0, size_t b1) {
        for (size_t b = b0; b < b1; b++) {
            size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
            T acc = zero;
            for (size_t i = lo; i < hi; i++) acc += f(i);
            partial[b] = acc;
        }
    });
    T acc = zero;
    for (auto& p : partial) acc += p;
    return acc;
}

}  // namespace hofa
