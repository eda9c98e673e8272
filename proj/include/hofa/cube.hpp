#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "hofa/group.hpp"

namespace hofa {

// Vertices of {0,1}^k are bitmasks; bit i-1 carries direction i.
inline int popcount32(uint32_t m) { return std::popcount(m); }

constexpr int kMaxCubeDim = 8;

// k-cube (x; h_1..h_k): vertex(omega) = x + omega . h.
struct CubeConfig {
    const FiniteGroupSpec* G = nullptr;
    uint64_t x = 0;
    std::vector<uint64_t> h;

    CubeConfig() = default;
    CubeConfig(const FiniteGroupSpec& g, uint64_t base, std::vector<uint64_t> edges)
        : G(&g), x(base), h(std::move(edges)) {}

    int dim() const { return (int)h.size(); }
    uint64_t vertex(uint32_t omega) const {
        uint64_t v = x;
        for (int i = 0; i < dim(); i++)
            if (omega & (1u << i)) v = G->add(v, h[i]);
        return v;
    }
    bool operator==(const CubeConfig& o) const { return x == o.x && h == o.h; }
};

// Face {omega : eta0 <= omega <= eta1} of {0,1}^k.
struct Face {
    uint32_t eta0 = 0, eta1 = 0;

    Face() = default;
    Face(uint32_t lo, uint32_t hi) : eta0(lo), eta1(hi) {}
    static Face lower(uint32_t eta) { return Face(0, eta); }            // F_eta
    static Face upper(uint32_t eta, int k) { return Face(eta, (1u << k) - 1); }  // F^eta
    static Face lower_codim1(int i, int k) { return Face(0, ((1u << k) - 1) & ~(1u << (i - 1))); }  // F_i
    static Face upper_codim1(int i, int k) { return Face(1u << (i - 1), (1u << k) - 1); }           // F^i

    bool valid(int k) const {
        return (eta0 & ~eta1) == 0 && eta1 < (1u << k);
    }
    int dim() const { return popcount32(eta1 ^ eta0); }
    uint32_t active() const { return eta1 ^ eta0; }
    bool contains(uint32_t omega) const { return (omega & ~eta1) == 0 && (eta0 & ~omega) == 0; }

    // tau_F: position of omega within the face, as a dim()-bit mask
    uint32_t project(uint32_t omega) const {
        uint32_t act = active(), out = 0;
        int j = 0;
        for (int i = 0; i < 32 && (act >> i); i++)
            if (act & (1u << i)) {
                if (omega & (1u << i)) out |= (1u << j);
                j++;
            }
        return out;
    }
    // inverse of tau_F restricted to the face
    uint32_t embed(uint32_t w) const {
        uint32_t act = active(), out = eta0;
        int j = 0;
        for (int i = 0; i < 32 && (act >> i); i++)
            if (act & (1u << i)) {
                if (w & (1u << j)) out |= (1u << i);
                j++;
            }
        return out;
    }
};

// Enumerate all faces of {0,1}^k (at most 4^k of them).
std::vector<Face> all_faces(int k);
std::vector<Face> faces_of_dim(int k, int d);

// Arbitrary labelling of {0,1}^k.
template <class T>
struct VertexLabelling {
    int k = 0;
    std::vector<T> v;  // size 2^k, indexed by omega

    VertexLabelling() = default;
    explicit VertexLabelling(int width) : k(width), v(size_t(1) << width) {}
    T& operator[](uint32_t omega) { return v[omega]; }
    const T& operator[](uint32_t omega) const { return v[omega]; }
    bool operator==(const VertexLabelling& o) const { return k == o.k && v == o.v; }
};

// c|_F for a plain labelling.
template <class T>
VertexLabelling<T> restrict_labelling(const VertexLabelling<T>& c, Face F) {
    if (!F.valid(c.k)) throw ArgumentError("restrict: malformed face");
    VertexLabelling<T> r(F.dim());
    for (uint32_t w = 0; w < (1u << F.dim()); w++) r[w] = c[F.embed(w)];
    return r;
}

// c|_F for a cube; the result is again a cube.
CubeConfig restrict_cube(const CubeConfig& c, Face F);

// [c0,c1]_i: c0 on the lower face, c1 on the upper face in direction i (1-based).
template <class T>
VertexLabelling<T> glue(const VertexLabelling<T>& c0, const VertexLabelling<T>& c1, int i) {
    if (c0.k != c1.k) throw ArgumentError("glue: width mismatch");
    int k = c0.k + 1;
    if (i < 1 || i > k) throw ArgumentError("glue: bad direction");
    VertexLabelling<T> r(k);
    Face lo = Face::lower_codim1(i, k), hi = Face::upper_codim1(i, k);
    for (uint32_t omega = 0; omega < (1u << k); omega++)
        r[omega] = (omega & (1u << (i - 1))) ? c1[hi.project(omega)] : c0[lo.project(omega)];
    return r;
}

// Cube glueing requires equal edge tuples; the glued cube gains direction i.
CubeConfig glue_cubes(const CubeConfig& c0, const CubeConfig& c1, int i);

// Duplication: the configuration restricting to c on every face parallel to F.
template <class T>
VertexLabelling<T> duplicate(const VertexLabelling<T>& c, Face F, int k) {
    if (!F.valid(k) || F.dim() != c.k) throw ArgumentError("duplicate: dimension mismatch");
    VertexLabelling<T> r(k);
    for (uint32_t omega = 0; omega < (1u << k); omega++) r[omega] = c[F.project(omega)];
    return r;
}
CubeConfig duplicate_cube(const CubeConfig& c, Face F, int k);

// [c, c + box(h)]_{k+1} as a cube: appends edge h.
CubeConfig extend_cube(const CubeConfig& c, uint64_t h);

// Value semantics used by the generic cube operations.
struct RatOps {
    using V = Rat;
    V zero() const { return Rat(0); }
    V add(const V& a, const V& b) const { return a + b; }
    V sub(const V& a, const V& b) const { return a - b; }
    V neg(const V& a) const { return -a; }
    bool eq(const V& a, const V& b) const { return a == b; }
    bool less(const V& a, const V& b) const { return a < b; }
};

struct TorusOps {
    using V = Rat;  // values canonicalized to [0,1)
    V zero() const { return Rat(0); }
    V add(const V& a, const V& b) const { return (a + b).frac(); }
    V sub(const V& a, const V& b) const { return (a - b).frac(); }
    V neg(const V& a) const { return (-a).frac(); }
    bool eq(const V& a, const V& b) const { return a == b; }
    bool less(const V& a, const V& b) const { return a < b; }
};

struct ZModOps {
    long long q = 2;
    using V = long long;
    V zero() const { return 0; }
    V add(V a, V b) const { return (a + b) % q; }
    V sub(V a, V b) const { return ((a - b) % q + q) % q; }
    V neg(V a) const { return (q - a % q) % q; }
    bool eq(V a, V b) const { return a == b; }
    bool less(V a, V b) const { return a < b; }
};

struct RatVecOps {
    int width = 1;
    using V = std::vector<Rat>;
    V zero() const { return V(width); }
    V add(const V& a, const V& b) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = a[i] + b[i];
        return r;
    }
    V sub(const V& a, const V& b) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = a[i] - b[i];
        return r;
    }
    V neg(const V& a) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = -a[i];
        return r;
    }
    bool eq(const V& a, const V& b) const { return a == b; }
    bool less(const V& a, const V& b) const { return a < b; }
};

// Values in (R/Z)^d.
struct TorusVecOps {
    int width = 1;
    using V = std::vector<Rat>;
    V zero() const { return V(width); }
    V add(const V& a, const V& b) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = (a[i] + b[i]).frac();
        return r;
    }
    V sub(const V& a, const V& b) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = (a[i] - b[i]).frac();
        return r;
    }
    V neg(const V& a) const {
        V r(width);
        for (int i = 0; i < width; i++) r[i] = (-a[i]).frac();
        return r;
    }
    bool eq(const V& a, const V& b) const { return a == b; }
    bool less(const V& a, const V& b) const { return a < b; }
};

// partial^k f(c) = sum_omega (-1)^{|omega|} f(c(omega)).
template <class Ops, class Table>
typename Ops::V derivative(const Ops& ops, const Table& values, const CubeConfig& c) {
    typename Ops::V acc = ops.zero();
    for (uint32_t omega = 0; omega < (1u << c.dim()); omega++) {
        uint64_t x = c.vertex(omega);
        acc = (popcount32(omega) & 1) ? ops.sub(acc, values[x]) : ops.add(acc, values[x]);
    }
    return acc;
}

// Sum over labelled vertices directly.
template <class Ops>
typename Ops::V alternating_sum(const Ops& ops, const VertexLabelling<typename Ops::V>& tau) {
    typename Ops::V acc = ops.zero();
    for (uint32_t omega = 0; omega < (1u << tau.k); omega++)
        acc = (popcount32(omega) & 1) ? ops.sub(acc, tau[omega]) : ops.add(acc, tau[omega]);
    return acc;
}

// Z_r(omega, omega') = sum over omega >= eta >= omega', |eta| <= r of (-1)^{|omega|-|eta|};
// zero when omega does not contain omega'.
long long z_coeff(int r, uint32_t omega, uint32_t omega_prime);

// tau'(w') = sum_w Z_r(w, w') tau(w).  Kills all entries with |w'| >= r+1.
template <class Ops>
VertexLabelling<typename Ops::V> normal_form_transform(const Ops& ops,
                                                       const VertexLabelling<typename Ops::V>& tau,
                                                       int r) {
    VertexLabelling<typename Ops::V> out(tau.k);
    for (uint32_t wp = 0; wp < (1u << tau.k); wp++) {
        typename Ops::V acc = ops.zero();
        for (uint32_t w = 0; w < (1u << tau.k); w++) {
            long long z = z_coeff(r, w, wp);
            for (long long t = 0; t < z; t++) acc = ops.add(acc, tau[w]);
            for (long long t = 0; t > z; t--) acc = ops.sub(acc, tau[w]);
        }
        out[wp] = acc;
    }
    return out;
}

// tau - tau' as an explicit combination of lower-face indicators of
// dimension >= r+1: list of (eta, coefficient) with tau - tau' =
// sum (-1)^{|eta|} coeff_eta 1_{F_eta}.
template <class Ops>
std::vector<std::pair<uint32_t, typename Ops::V>> normal_form_defect_decomposition(
    const Ops& ops, const VertexLabelling<typename Ops::V>& tau, int r) {
    std::vector<std::pair<uint32_t, typename Ops::V>> out;
    for (uint32_t eta = 0; eta < (1u << tau.k); eta++) {
        if (popcount32(eta) < r + 1) continue;
        typename Ops::V acc = ops.zero();
        for (uint32_t w = 0; w < (1u << tau.k); w++) {
            if ((w & eta) != eta) continue;
            acc = (popcount32(w) & 1) ? ops.sub(acc, tau[w]) : ops.add(acc, tau[w]);
        }
        out.emplace_back(eta, acc);
    }
    return out;
}

// Both sides of the discrete product rule; they agree exactly.
std::pair<Rat, Rat> leibniz_sides(const VertexLabelling<Rat>& alpha, const VertexLabelling<Rat>& beta);

// Tricube decomposition: signed cubes (sign_eta, (x_eta; h_eta)) with
// sum_eta sign_eta * partial^k f(cube_eta) = partial^k f((x; h')) for all f.
std::vector<std::pair<int, CubeConfig>> tricube(const FiniteGroupSpec& G, uint64_t x,
                                                const std::vector<uint64_t>& h,
                                                const std::vector<uint64_t>& h_prime);

}  // namespace hofa
