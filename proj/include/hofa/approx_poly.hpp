#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "hofa/cube_system.hpp"

namespace hofa {

struct ApproxPolyReport {
    int s = 0;
    BigInt vanishing;     // cubes with all vertices defined and zero derivative
    BigInt well_defined;  // cubes with all vertices defined
    BigInt total;         // |H|^{s+2}
    Rat eps;              // vanishing / well_defined (0 when none defined)
};

// Fraction of vanishing order-(s+1) derivatives among well-defined ones.
template <class Ops, class Fn>
ApproxPolyReport ap_parameter(const Ops& ops, const Fn& f, int s) {
    const FiniteGroupSpec& G = *f.G;
    ApproxPolyReport rep;
    rep.s = s;
    CubeIndexer idx{&G, s + 1};
    uint64_t n = idx.size();
    long long vanish = 0, defined = 0;
    for (uint64_t i = 0; i < n; i++) {
        CubeConfig c = idx.cube(i);
        bool ok = true;
        for (uint32_t w = 0; w < (1u << (s + 1)) && ok; w++)
            if (!f.is_defined(c.vertex(w))) ok = false;
        if (!ok) continue;
        defined++;
        if (ops.eq(derivative(ops, f.v, c), ops.zero())) vanish++;
    }
    rep.vanishing = BigInt(vanish);
    rep.well_defined = BigInt(defined);
    rep.total = BigInt((long long)n);
    rep.eps = defined ? Rat(vanish, defined) : Rat(0);
    return rep;
}

// Majority-vote extension: from f whose order-(s+1) derivatives vanish on
// most cubes, produce f~ with identically vanishing derivative, agreeing
// with f on the set X of popular base points.  The measured density of the
// vanishing set is reported; the lemma needs 1 - mu < 2^{-2s-2} but the
// vote is attempted regardless and AmbiguityError signals a failed vote.
template <class Ops>
struct MajorityExtendResult {
    std::vector<typename Ops::V> extended;
    std::vector<uint8_t> X;  // base points where >= half the cubes vanish
    Rat vanishing_density;
    bool precondition_met;
};

template <class Ops, class Fn>
MajorityExtendResult<Ops> majority_extend(const Ops& ops, const Fn& f, int s) {
    const FiniteGroupSpec& G = *f.G;
    uint64_t n = G.order();
    int k = s + 1;
    // S = vanishing cubes, counted per base point
    uint64_t hcount = 1;
    for (int i = 0; i < k; i++) hcount *= n;
    std::vector<uint64_t> base_hits(n, 0);
    uint64_t vanish_total = 0;
    std::vector<uint64_t> h(k);
    for (uint64_t x = 0; x < n; x++) {
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t t = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = t % n;
                t /= n;
            }
            CubeConfig c(G, x, h);
            if (ops.eq(derivative(ops, f.v, c), ops.zero())) {
                base_hits[x]++;
                vanish_total++;
            }
        }
    }
    MajorityExtendResult<Ops> out;
    out.vanishing_density = Rat(BigInt((long long)vanish_total), BigInt((long long)(n * hcount)));
    out.precondition_met =
        (Rat(1) - out.vanishing_density) < Rat(1, BigInt::pow(BigInt(2), 2 * s + 2).to_i64());
    out.X.assign(n, 0);
    for (uint64_t x = 0; x < n; x++)
        if (2 * base_hits[x] >= hcount) out.X[x] = 1;

    // strict-majority vote over g_h(x) = -sum_{w != 0} (-1)^{|w|} f(x + w.h);
    // trusted[x] limits which votes count (all points in the first pass)
    auto vote_at = [&](uint64_t x, const std::vector<uint8_t>& trusted,
                       const std::vector<typename Ops::V>& table, bool& have,
                       typename Ops::V& winner) {
        std::vector<std::pair<typename Ops::V, uint64_t>> votes;
        uint64_t cast = 0;
        std::vector<uint64_t> hh(k);
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t t = hi;
            for (int i = k - 1; i >= 0; i--) {
                hh[i] = t % n;
                t /= n;
            }
            CubeConfig c(G, x, hh);
            typename Ops::V acc = ops.zero();
            bool ok = true;
            for (uint32_t w = 1; w < (1u << k) && ok; w++) {
                uint64_t y = c.vertex(w);
                if (!trusted[y]) {
                    ok = false;
                    break;
                }
                acc = (popcount32(w) & 1) ? ops.add(acc, table[y]) : ops.sub(acc, table[y]);
            }
            if (!ok) continue;
            cast++;
            bool found = false;
            for (auto& [v, cnt] : votes)
                if (ops.eq(v, acc)) {
                    cnt++;
                    found = true;
                    break;
                }
            if (!found) votes.emplace_back(acc, 1);
        }
        have = false;
        uint64_t best = 0;
        for (auto& [v, cnt] : votes)
            if (cnt > best) {
                best = cnt;
                winner = v;
            }
        have = (best > 0 && 2 * best > cast);
    };

    out.extended.resize(n, ops.zero());
    std::vector<uint8_t> decided(n, 0), all(n, 1);
    for (uint64_t x = 0; x < n; x++) {
        bool have = false;
        typename Ops::V w = ops.zero();
        vote_at(x, all, f.v, have, w);
        if (have) {
            out.extended[x] = w;
            decided[x] = 1;
        }
    }
    // second pass: ambiguous points are re-voted against the points that won
    // a strict majority (the vote applied to the trustworthy restriction)
    if (std::count(decided.begin(), decided.end(), (uint8_t)1) < (long long)n) {
        for (uint64_t x = 0; x < n; x++) {
            if (decided[x]) continue;
            bool have = false;
            typename Ops::V w = ops.zero();
            vote_at(x, decided, out.extended, have, w);
            if (!have) throw AmbiguityError("majority_extend: no strict majority at some point");
            out.extended[x] = w;
        }
    }
    // outside the lemma's hypotheses the vote can settle on an inconsistent
    // table; the promised conclusion is part of the contract, so check it
    for (uint64_t x = 0; x < n; x++) {
        for (uint64_t hi = 0; hi < hcount; hi++) {
            uint64_t t = hi;
            for (int i = k - 1; i >= 0; i--) {
                h[i] = t % n;
                t /= n;
            }
            if (!ops.eq(derivative(ops, out.extended, CubeConfig(G, x, h)), ops.zero()))
                throw AmbiguityError("majority_extend: vote produced an inconsistent extension");
        }
    }
    return out;
}

// Integer coefficient data attached to (cube, vertex) pairs, graded by
// hierarchy level; levels r = 0..t-1 of widths dims[r], flattened.
struct BCoeffs {
    int k = 0;  // cube dimension
    int t = 0;  // degree
    std::vector<int> dims;
    std::unordered_map<uint64_t, std::vector<std::vector<long long>>> data;  // cube -> per-vertex rows

    int offset(int r) const {
        int o = 0;
        for (int i = 0; i < r; i++) o += dims[i];
        return o;
    }
    int width() const { return offset(t); }
    bool has(uint64_t cube_idx) const { return data.count(cube_idx) > 0; }
    const std::vector<long long>& at(uint64_t cube_idx, uint32_t omega) const {
        return data.at(cube_idx)[omega];
    }
    // l1 norm of the level-r slice of a row
    static long long level_norm(const std::vector<long long>& row, int off, int d) {
        long long s = 0;
        for (int i = 0; i < d; i++) s += row[off + i] < 0 ? -row[off + i] : row[off + i];
        return s;
    }
    bool normal_form() const;
};

// Tuple (f_{i,j}) with dims d_0..d_s, host system, parameter M, and the
// witnesses b^{i,j} for each member's (i+1)-derivatives condition.
struct PolynomialHierarchy {
    const FiniteGroupSpec* G = nullptr;
    int s = 0;
    std::vector<int> dims;                     // d_0..d_s
    std::vector<std::vector<RealFn>> fns;      // fns[i][j]
    Rat M;
    CubeSystem host;
    std::vector<std::vector<BCoeffs>> b;       // b[i][j]

    int total_dim(int upto_level) const {  // sum of dims below the level
        int d = 0;
        for (int i = 0; i < upto_level; i++) d += dims[i];
        return d;
    }
    // f_{<= t-1}(x) as a flat vector
    std::vector<Rat> eval_below(int t, uint64_t x) const;
};

struct DerivCheck {
    bool holds = false;
    bool norms_ok = false;
    Rat worst_residual;        // max |lhs - rhs| over checked cubes
    uint64_t failing_cube = 0;  // valid when !holds
    uint64_t checked = 0;
};

// Exact check of the k-derivatives condition of degree t with parameter M:
// partial^k g(c) = sum_w (-1)^{|w|} b(c,w) . f_{<= t-1}(c(w)) on every
// c in S, plus the graded norm bounds |b_{=r}| <= M^{t-r}.
DerivCheck verify_deriv_condition(const RealFn& g, const PolynomialHierarchy& f, const BCoeffs& b,
                                  const Bitset& S, int k, int t, const Rat& M);

// Hierarchy self-check: every member's own derivatives condition.
bool verify_hierarchy(const PolynomialHierarchy& f);

// Normal form of b (b_{=r}(c,w) = 0 for |w| >= r+1) preserving the
// derivative sums exactly; the top layer follows the explicit Z formula.
BCoeffs normalize_b(const PolynomialHierarchy& f, const BCoeffs& b, const Bitset& S, int k, int t);

// Fractions of glueing triples with b(c0,w) != b(c1,w), per direction i
// and vertex w with w(i) = 1.  b must be in normal form.
struct CompatDefect {
    // defect[i-1][w] for i in [k], w with w(i)=1; others zero
    std::vector<std::vector<Rat>> defect;
    Rat max_defect;
};
CompatDefect upper_compat_defect(const FiniteGroupSpec& G, const BCoeffs& b, const Bitset& S, int k);

// Fraction of glueing triples violating the type-r glueing law
// b(c,.) = Z_r-normal-form of the spliced configuration, per direction.
struct GenCocycleDefect {
    std::vector<Rat> per_direction;
    Rat max_defect;
};
GenCocycleDefect gen_cocycle_defect(const FiniteGroupSpec& G, const BCoeffs& b, const Bitset& S,
                                    int k, int r);

// f' reduces f with parameter K: witnesses v_x with |v|_1 <= K and
// f_{i,j}(x) = v . f'(x); rewriting a derivatives condition over f into one
// over f' with parameter K*M.
struct ReduceResult {
    BCoeffs rewritten;
    long long K_used = 0;
};
ReduceResult reduce_hierarchy(const PolynomialHierarchy& f, const PolynomialHierarchy& f_prime,
                              long long K, const RealFn& g, const BCoeffs& b, const Bitset& S,
                              int k, int t);

// Randomized global extension: from f with vanishing derivatives on a
// connected system, produce a near-total f~ and lower-degree difference
// functions g_r with explicit integer coefficients realizing every
// derivative over the certified cube set.
struct ExtendGlobalResult {
    std::vector<uint8_t> X;
    RealFn f_tilde;  // masked by X
    Bitset S;        // subset of C^{s+1}(H)
    std::vector<RealFn> g;             // difference functions, masked
    std::vector<std::pair<uint64_t, uint64_t>> g_shift;  // (a, b) with g_r = f(.+a) - f(.+b)
    std::vector<CubeSystem> g_systems;  // degree s-1 systems for each g_r
    BCoeffs b;
    long long K = 0;       // number of difference functions
    long long M = 0;       // max |b|_1 seen
    Rat mu_X, mu_S;
    uint64_t L = 0;
    int attempts = 0;
};
ExtendGlobalResult extend_global(const RealFn& f, const CubeSystem& S, const Rat& eps,
                                 uint64_t seed, int retry_budget = 20);

// Full pipeline: approximate polynomial -> pruned split system -> recursive
// global extension -> polynomial hierarchy with a verified derivatives
// condition for the extension g~.
struct BuildHierarchyResult {
    CubeSystem system;
    PolynomialHierarchy hierarchy;
    RealFn g_tilde;
    BCoeffs b;
    std::vector<uint8_t> Y;  // agreement set, subset of S_0
    Rat mu_Y;
    long long D = 0;
    Rat M;
};
BuildHierarchyResult build_hierarchy(const RealFn& g, int s, const Rat& delta, const Rat& eps,
                                     uint64_t seed);

}  // namespace hofa
