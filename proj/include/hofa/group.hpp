#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/rational.hpp"

namespace hofa {

using Cplx = std::complex<double>;

// H = (Z/N^kappa)^rank.  Elements are indices in [0, order); the index is
// the mixed-radix encoding of the residue tuple with the first coordinate
// most significant, so index order is lexicographic on tuples.
class FiniteGroupSpec {
public:
    static constexpr uint64_t kDefaultCap = 1000000;

    FiniteGroupSpec(long long N, long long kappa, long long rank,
                    bool allow_composite = false, uint64_t cap = kDefaultCap);

    long long N() const { return N_; }
    long long kappa() const { return kappa_; }
    long long rank() const { return rank_; }
    long long modulus() const { return modulus_; }  // N^kappa
    uint64_t order() const { return order_; }

    uint64_t zero() const { return 0; }
    uint64_t add(uint64_t a, uint64_t b) const;
    uint64_t sub(uint64_t a, uint64_t b) const;
    uint64_t neg(uint64_t a) const;
    uint64_t scale(long long k, uint64_t a) const;
    long long coord(uint64_t a, long long i) const;
    uint64_t from_coords(const std::vector<long long>& c) const;

    // <a,x> = sum_i a_i x_i mod N^kappa
    long long pairing(uint64_t a, uint64_t x) const;
    Cplx character(uint64_t a, uint64_t x) const;  // e(<a,x>/N^kappa)

    // multiplicative inverse of k mod N^kappa; ArgumentError when gcd != 1
    long long unit_inverse(long long k) const;
    // x -> x/k coordinatewise
    uint64_t divide_by_unit(uint64_t x, long long k) const;

    bool operator==(const FiniteGroupSpec& o) const {
        return N_ == o.N_ && kappa_ == o.kappa_ && rank_ == o.rank_;
    }

private:
    long long N_, kappa_, rank_, modulus_;
    uint64_t order_;
    std::vector<uint64_t> stride_;
};

// Stable element enumeration (the identity on indices, exposed for the
// index<->element bijection contract).
std::vector<uint64_t> enumerate(const FiniteGroupSpec& G);

// Dense complex table on H; no mask (mask-carrying codomains live below).
struct CplxFn {
    const FiniteGroupSpec* G = nullptr;
    std::vector<Cplx> v;

    CplxFn() = default;
    explicit CplxFn(const FiniteGroupSpec& g) : G(&g), v(g.order(), Cplx(0, 0)) {}
    Cplx& operator[](uint64_t x) { return v[x]; }
    const Cplx& operator[](uint64_t x) const { return v[x]; }
};

// Dense rational table with optional domain mask.
struct RealFn {
    const FiniteGroupSpec* G = nullptr;
    std::vector<Rat> v;
    std::vector<uint8_t> defined;  // empty means total

    RealFn() = default;
    explicit RealFn(const FiniteGroupSpec& g) : G(&g), v(g.order()) {}
    bool total() const { return defined.empty(); }
    bool is_defined(uint64_t x) const { return defined.empty() || defined[x]; }
    Rat& operator[](uint64_t x) { return v[x]; }
    const Rat& operator[](uint64_t x) const { return v[x]; }
};

// Values in R/Z, canonicalized to [0,1).
struct TorusFn {
    const FiniteGroupSpec* G = nullptr;
    std::vector<Rat> v;
    std::vector<uint8_t> defined;

    TorusFn() = default;
    explicit TorusFn(const FiniteGroupSpec& g) : G(&g), v(g.order()) {}
    bool is_defined(uint64_t x) const { return defined.empty() || defined[x]; }
    void set(uint64_t x, const Rat& r) { v[x] = r.frac(); }
    const Rat& operator[](uint64_t x) const { return v[x]; }
};

// Integer-vector values of fixed width.
struct VecFn {
    const FiniteGroupSpec* G = nullptr;
    int width = 0;
    std::vector<std::vector<Rat>> v;
    std::vector<uint8_t> defined;

    VecFn() = default;
    VecFn(const FiniteGroupSpec& g, int w)
        : G(&g), width(w), v(g.order(), std::vector<Rat>(w)) {}
    bool is_defined(uint64_t x) const { return defined.empty() || defined[x]; }
};

// Discrete Fourier transform: fhat(a) = E_x f(x) conj(chi_a(x)).
// Parseval: sum_a |fhat(a)|^2 = E_x |f(x)|^2.
std::vector<Cplx> fourier_transform(const CplxFn& f);
CplxFn fourier_invert(const FiniteGroupSpec& G, const std::vector<Cplx>& fhat);

}  // namespace hofa
