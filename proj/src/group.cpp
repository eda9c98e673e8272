#include "hofa/group.hpp"

#include <cmath>
#include <numeric>

namespace hofa {

namespace {
constexpr double kTau = 6.283185307179586476925286766559;

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; d++)
        if (n % d == 0) return false;
    return true;
}
}  // namespace

FiniteGroupSpec::FiniteGroupSpec(long long N, long long kappa, long long rank,
                                 bool allow_composite, uint64_t cap)
    : N_(N), kappa_(kappa), rank_(rank) {
    if (N < 2 || kappa < 1 || rank < 1) throw ArgumentError("group: need N >= 2, kappa >= 1, rank >= 1");
    if (!allow_composite && !is_prime(N)) throw ArgumentError("group: composite N requires the composite flag");
    long long m = 1;
    for (long long i = 0; i < kappa; i++) {
        if (m > (long long)(cap + 1) / N + 1) throw SizeError("group: N^kappa exceeds cap");
        m *= N;
    }
    modulus_ = m;
    uint64_t ord = 1;
    for (long long i = 0; i < rank; i++) {
        if (ord > cap / (uint64_t)m + 1) throw SizeError("group: order exceeds cap");
        ord *= (uint64_t)m;
        if (ord > cap) throw SizeError("group: order exceeds cap");
    }
    order_ = ord;
    stride_.resize(rank);
    uint64_t s = 1;
    for (long long i = rank - 1; i >= 0; i--) {
        stride_[i] = s;
        s *= (uint64_t)m;
    }
}

uint64_t FiniteGroupSpec::add(uint64_t a, uint64_t b) const {
    if (rank_ == 1) {
        uint64_t s = a + b;
        return s >= (uint64_t)modulus_ ? s - modulus_ : s;
    }
    uint64_t r = 0;
    for (long long i = 0; i < rank_; i++) {
        uint64_t ca = (a / stride_[i]) % modulus_, cb = (b / stride_[i]) % modulus_;
        uint64_t s = ca + cb;
        if (s >= (uint64_t)modulus_) s -= modulus_;
        r += s * stride_[i];
    }
    return r;
}

uint64_t FiniteGroupSpec::neg(uint64_t a) const {
    if (rank_ == 1) return a == 0 ? 0 : (uint64_t)modulus_ - a;
    uint64_t r = 0;
    for (long long i = 0; i < rank_; i++) {
        uint64_t c = (a / stride_[i]) % modulus_;
        r += (c == 0 ? 0 : (uint64_t)modulus_ - c) * stride_[i];
    }
    return r;
}

uint64_t FiniteGroupSpec::sub(uint64_t a, uint64_t b) const { return add(a, neg(b)); }

uint64_t FiniteGroupSpec::scale(long long k, uint64_t a) const {
    long long km = k % modulus_;
    if (km < 0) km += modulus_;
    uint64_t r = 0;
    for (long long i = 0; i < rank_; i++) {
        uint64_t c = (a / stride_[i]) % modulus_;
        r += (uint64_t)((__int128)c * km % modulus_) * stride_[i];
    }
    return r;
}

long long FiniteGroupSpec::coord(uint64_t a, long long i) const {
    return (long long)((a / stride_[i]) % modulus_);
}

uint64_t FiniteGroupSpec::from_coords(const std::vector<long long>& c) const {
    uint64_t r = 0;
    for (long long i = 0; i < rank_; i++) {
        long long v = c[i] % modulus_;
        if (v < 0) v += modulus_;
        r += (uint64_t)v * stride_[i];
    }
    return r;
}

long long FiniteGroupSpec::pairing(uint64_t a, uint64_t x) const {
    long long s = 0;
    for (long long i = 0; i < rank_; i++) {
        s = (s + (__int128)coord(a, i) * coord(x, i) % modulus_) % modulus_;
    }
    return s;
}

Cplx FiniteGroupSpec::character(uint64_t a, uint64_t x) const {
    double t = kTau * (double)pairing(a, x) / (double)modulus_;
    return Cplx(std::cos(t), std::sin(t));
}

long long FiniteGroupSpec::unit_inverse(long long k) const {
    long long m = modulus_;
    long long a = ((k % m) + m) % m;
    if (std::gcd(a, m) != 1) throw ArgumentError("group: not a unit mod N^kappa");
    long long t0 = 0, t1 = 1, r0 = m, r1 = a;
    while (r1 != 0) {
        long long q = r0 / r1;
        long long t2 = t0 - q * t1, r2 = r0 - q * r1;
        t0 = t1;
        t1 = t2;
        r0 = r1;
        r1 = r2;
    }
    return ((t0 % m) + m) % m;
}

uint64_t FiniteGroupSpec::divide_by_unit(uint64_t x, long long k) const {
    return scale(unit_inverse(k), x);
}

std::vector<uint64_t> enumerate(const FiniteGroupSpec& G) {
    std::vector<uint64_t> e(G.order());
    for (uint64_t i = 0; i < G.order(); i++) e[i] = i;
    return e;
}

std::vector<Cplx> fourier_transform(const CplxFn& f) {
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    std::vector<Cplx> fhat(n, Cplx(0, 0));
    for (uint64_t a = 0; a < n; a++) {
        Cplx acc(0, 0);
        for (uint64_t x = 0; x < n; x++) acc += f.v[x] * std::conj(G.character(a, x));
        fhat[a] = acc / (double)n;
    }
    return fhat;
}

CplxFn fourier_invert(const FiniteGroupSpec& G, const std::vector<Cplx>& fhat) {
    uint64_t n = G.order();
    CplxFn f(G);
    for (uint64_t x = 0; x < n; x++) {
        Cplx acc(0, 0);
        for (uint64_t a = 0; a < n; a++) acc += fhat[a] * G.character(a, x);
        f.v[x] = acc;
    }
    return f;
}

}  // namespace hofa
