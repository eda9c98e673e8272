#include "hofa/nil.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "hofa/util.hpp"

namespace hofa {

namespace {

// generalized binomial coefficient over the rationals
Rat rat_binom(const Rat& a, int n) {
    Rat num(1);
    long long den = 1;
    for (int i = 0; i < n; i++) {
        num *= (a - Rat(i));
        den *= (i + 1);
    }
    return num / Rat(den);
}

// enumerate multi-indices k with sum_i weights[i] * k[i] <= t
void weighted_indices(const std::vector<int>& weights, int t, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(weights.size(), 0);
    std::function<void(size_t, int)> rec = [&](size_t pos, int left) {
        if (pos == weights.size()) {
            out.push_back(cur);
            return;
        }
        for (int k = 0; k * weights[pos] <= left; k++) {
            cur[pos] = k;
            rec(pos + 1, left - k * weights[pos]);
        }
        cur[pos] = 0;
    };
    rec(0, t);
}

int weighted_degree(const std::vector<int>& weights, const std::vector<int>& k) {
    int w = 0;
    for (size_t i = 0; i < k.size(); i++) w += weights[i] * k[i];
    return w;
}

std::string elt_key(const Elt& e) {
    std::string s;
    for (auto& v : e) {
        s += v.to_string();
        s += ',';
    }
    return s;
}

}  // namespace

Rat SparsePoly::eval(const std::vector<Rat>& v) const {
    Rat acc(0);
    for (const Term& t : terms) {
        Rat prod = t.c;
        for (int i = 0; i < nvars; i++)
            for (int e = 0; e < t.e[i]; e++) prod *= v[i];
        acc += prod;
    }
    return acc;
}

Presentation::Presentation(int degree, std::vector<int> dims, std::vector<SparsePoly> law,
                           Rat complexity, std::string name, bool)
    : degree_(degree), dims_(std::move(dims)), law_(std::move(law)), M_(std::move(complexity)),
      name_(std::move(name)) {
    D_ = 0;
    offset_.resize(degree_ + 1);
    for (int i = 1; i <= degree_; i++) {
        offset_[i - 1] = D_;
        D_ += dims_[i - 1];
    }
    offset_[degree_] = D_;
    level_.resize(D_);
    for (int i = 1; i <= degree_; i++)
        for (int j = 0; j < dims_[i - 1]; j++) level_[offset_[i - 1] + j] = i;
    if ((int)law_.size() != D_) throw ArgumentError("presentation: law must cover every coordinate");
    // the level-i coordinate of a product must be x_i + y_i plus a
    // polynomial in strictly lower levels
    for (int c = 0; c < D_; c++) {
        int lev = level_[c];
        bool seen_x = false, seen_y = false;
        for (const auto& t : law_[c].terms) {
            int deg = 0;
            bool own_x = false, own_y = false, high = false;
            for (int v = 0; v < 2 * D_; v++) {
                if (t.e[v] == 0) continue;
                deg += t.e[v];
                int coord = v % D_;
                if (level_[coord] > lev || (level_[coord] == lev && coord != c)) high = true;
                if (coord == c) (v < D_ ? own_x : own_y) = true;
            }
            if (own_x && deg == 1 && t.c == Rat(1)) {
                seen_x = true;
                continue;
            }
            if (own_y && deg == 1 && t.c == Rat(1)) {
                seen_y = true;
                continue;
            }
            if (high || own_x || own_y)
                throw ArgumentError("presentation: law is not graded at coordinate " +
                                    std::to_string(c));
        }
        if (!seen_x || !seen_y)
            throw ArgumentError("presentation: law must contain x + y at each coordinate");
    }
}

Elt Presentation::multiply(const Elt& a, const Elt& b) const {
    std::vector<Rat> v(2 * D_);
    for (int i = 0; i < D_; i++) {
        v[i] = a[i];
        v[D_ + i] = b[i];
    }
    Elt out(D_);
    for (int c = 0; c < D_; c++) out[c] = law_[c].eval(v);
    return out;
}

Elt Presentation::inverse(const Elt& a) const {
    // graded peeling: at each level the product law is x + y + lower terms
    Elt h(D_);
    for (int lev = 1; lev <= degree_; lev++) {
        Elt prod = multiply(a, h);
        for (int j = 0; j < dims_[lev - 1]; j++) {
            int c = offset_[lev - 1] + j;
            h[c] -= prod[c];
        }
    }
    Elt check = multiply(a, h);
    for (int c = 0; c < D_; c++)
        if (!check[c].is_zero()) throw Error("presentation: inverse peeling failed");
    return h;
}

Elt Presentation::commutator(const Elt& a, const Elt& b) const {
    return multiply(multiply(inverse(a), inverse(b)), multiply(a, b));
}

Elt Presentation::generator(int level, int j, const Rat& exponent) const {
    Elt e(D_);
    e[offset_[level - 1] + j] = exponent;
    return e;
}

bool Presentation::integral(const Elt& a) const {
    for (auto& v : a)
        if (!v.is_integer()) return false;
    return true;
}

int Presentation::filtration_level(const Elt& a) const {
    for (int lev = 1; lev <= degree_; lev++)
        for (int j = 0; j < dims_[lev - 1]; j++)
            if (!a[offset_[lev - 1] + j].is_zero()) return lev;
    return degree_ + 1;  // identity lies arbitrarily deep
}

std::pair<Elt, Elt> Presentation::reduce_fundamental(const Elt& g,
                                                     const std::vector<Rat>* shift) const {
    Elt cur = g, gamma = identity();
    for (int lev = 1; lev <= degree_; lev++) {
        Elt u(D_);
        for (int j = 0; j < dims_[lev - 1]; j++) {
            int c = offset_[lev - 1] + j;
            Rat base = shift ? (*shift)[c] : Rat(0);
            u[c] = Rat((cur[c] - base).floor());
        }
        cur = multiply(cur, inverse(u));
        gamma = multiply(u, gamma);
    }
    if (!integral(gamma)) throw Error("reduce_fundamental: non-integral lattice part");
    for (int c = 0; c < D_; c++) {
        Rat base = shift ? (*shift)[c] : Rat(0);
        if (cur[c] < base || cur[c] >= base + Rat(1))
            throw Error("reduce_fundamental: representative out of the box");
    }
    Elt check = multiply(cur, gamma);
    for (int c = 0; c < D_; c++)
        if (!(check[c] == g[c])) throw Error("reduce_fundamental: h * gamma != g");
    return {cur, gamma};
}

Rat Presentation::metric_upper(const Elt& g) const {
    Rat acc(0);
    for (auto& v : g) acc += v.abs();
    return acc;
}

void Presentation::validate(Rng& rng, int samples) const {
    auto rand_elt = [&]() {
        Elt e(D_);
        for (auto& v : e) v = Rat(rng.range(-6, 6), rng.range(1, 4));
        return e;
    };
    for (int it = 0; it < samples; it++) {
        Elt a = rand_elt(), b = rand_elt(), c = rand_elt();
        Elt lhs = multiply(multiply(a, b), c);
        Elt rhs = multiply(a, multiply(b, c));
        if (!(lhs == rhs)) throw ArgumentError("presentation: associativity fails on a sample");
        Elt ai = inverse(a);
        if (filtration_level(multiply(a, ai)) <= degree_)
            throw ArgumentError("presentation: inverse law fails on a sample");
        // integrality closure on integer points
        Elt za(D_), zb(D_);
        for (auto& v : za) v = Rat(rng.range(-3, 3));
        for (auto& v : zb) v = Rat(rng.range(-3, 3));
        if (!integral(multiply(za, zb)) || !integral(inverse(za)))
            throw ArgumentError("presentation: lattice not closed under the law");
        // filtration law on leveled samples
        int li = 1 + (int)rng.below(degree_), lj = 1 + (int)rng.below(degree_);
        Elt gi(D_), gj(D_);
        for (int coord = 0; coord < D_; coord++) {
            if (level_[coord] >= li) gi[coord] = Rat(rng.range(-4, 4), rng.range(1, 3));
            if (level_[coord] >= lj) gj[coord] = Rat(rng.range(-4, 4), rng.range(1, 3));
        }
        if (filtration_level(commutator(gi, gj)) < std::min(li + lj, degree_ + 1))
            throw ArgumentError("presentation: commutator escapes the filtration");
    }
    // generator commutators are integral and bounded by the complexity
    for (int c1 = 0; c1 < D_; c1++) {
        for (int c2 = 0; c2 < D_; c2++) {
            Elt g1(D_), g2(D_);
            g1[c1] = Rat(1);
            g2[c2] = Rat(1);
            Elt com = commutator(g1, g2);
            for (auto& v : com) {
                if (!v.is_integer())
                    throw ArgumentError("presentation: generator commutator not integral");
                if (v.abs() > M_) throw ArgumentError("presentation: commutator exceeds complexity");
            }
            if (filtration_level(com) < std::min(level_[c1] + level_[c2], degree_ + 1))
                throw ArgumentError("presentation: generator commutator too shallow");
        }
    }
}

Presentation builtin_heisenberg() {
    // coordinates (a, b, c); (a,b,c)(a',b',c') = (a+a', b+b', c+c'-a'b)
    int D = 3;
    auto mono = [&](const Rat& coef, std::initializer_list<std::pair<int, int>> vars) {
        SparsePoly::Term t;
        t.c = coef;
        t.e.assign(2 * D, 0);
        for (auto [v, e] : vars) t.e[v] = e;
        return t;
    };
    std::vector<SparsePoly> law(3);
    for (auto& p : law) p.nvars = 2 * D;
    law[0].terms = {mono(Rat(1), {{0, 1}}), mono(Rat(1), {{3, 1}})};
    law[1].terms = {mono(Rat(1), {{1, 1}}), mono(Rat(1), {{4, 1}})};
    law[2].terms = {mono(Rat(1), {{2, 1}}), mono(Rat(1), {{5, 1}}),
                    mono(Rat(-1), {{3, 1}, {1, 1}})};
    return Presentation(2, {2, 1}, std::move(law), Rat(1), "heisenberg", true);
}

Presentation builtin_abelian(const std::vector<int>& dims_per_level) {
    int D = 0;
    for (int d : dims_per_level) D += d;
    std::vector<SparsePoly> law(D);
    for (int c = 0; c < D; c++) {
        law[c].nvars = 2 * D;
        SparsePoly::Term tx, ty;
        tx.c = Rat(1);
        tx.e.assign(2 * D, 0);
        tx.e[c] = 1;
        ty.c = Rat(1);
        ty.e.assign(2 * D, 0);
        ty.e[D + c] = 1;
        law[c].terms = {tx, ty};
    }
    return Presentation((int)dims_per_level.size(), dims_per_level, std::move(law), Rat(1),
                        "abelian", true);
}

Presentation direct_product(const Presentation& A, const Presentation& B) {
    int degree = std::max(A.degree(), B.degree());
    std::vector<int> dims(degree, 0);
    for (int i = 1; i <= A.degree(); i++) dims[i - 1] += A.dims()[i - 1];
    for (int i = 1; i <= B.degree(); i++) dims[i - 1] += B.dims()[i - 1];
    int D = A.dim() + B.dim();
    // coordinate layout: level-major; map each factor coordinate to its slot
    std::vector<int> slotA(A.dim()), slotB(B.dim());
    {
        std::vector<int> used(degree, 0);
        std::vector<int> offset(degree, 0);
        int acc = 0;
        for (int i = 0; i < degree; i++) {
            offset[i] = acc;
            acc += dims[i];
        }
        for (int c = 0; c < A.dim(); c++) {
            int lev = A.level_of(c);
            slotA[c] = offset[lev - 1] + used[lev - 1]++;
        }
        for (int c = 0; c < B.dim(); c++) {
            int lev = B.level_of(c);
            slotB[c] = offset[lev - 1] + used[lev - 1]++;
        }
    }
    std::vector<SparsePoly> law(D);
    for (auto& p : law) p.nvars = 2 * D;
    auto import_law = [&](const Presentation& P, const std::vector<int>& slot,
                          const SparsePoly& src, int target) {
        for (const auto& t : src.terms) {
            SparsePoly::Term nt;
            nt.c = t.c;
            nt.e.assign(2 * D, 0);
            for (int v = 0; v < 2 * P.dim(); v++) {
                if (t.e[v] == 0) continue;
                int coord = v % P.dim();
                int s = slot[coord] + (v < P.dim() ? 0 : D);
                nt.e[s] = t.e[v];
            }
            law[target].terms.push_back(std::move(nt));
        }
    };
    // rebuild each coordinate's law from its factor
    {
        // recover factor laws by evaluating? not needed: copy polynomials
        for (int c = 0; c < A.dim(); c++) import_law(A, slotA, A.law_at(c), slotA[c]);
        for (int c = 0; c < B.dim(); c++) import_law(B, slotB, B.law_at(c), slotB[c]);
    }
    Rat M = std::max(A.complexity(), B.complexity());
    return Presentation(degree, dims, std::move(law), M, A.name() + "x" + B.name(), true);
}

std::vector<Rat> AbelianPolyMap::eval(const std::vector<Rat>& v) const {
    std::vector<Rat> out(width, Rat(0));
    for (const auto& [k, a] : alpha) {
        Rat b(1);
        for (size_t i = 0; i < k.size(); i++)
            if (k[i]) b *= rat_binom(v[i], k[i]);
        if (b.is_zero()) continue;
        for (int d = 0; d < width; d++) out[d] += a[d] * b;
    }
    return out;
}

bool AbelianPolyMap::integral_coefficients() const {
    for (const auto& [k, a] : alpha)
        for (const auto& v : a)
            if (!v.is_integer()) return false;
    return true;
}

AbelianPolyMap taylor_fit(const std::function<std::vector<Rat>(const std::vector<int>&)>& p,
                          const std::vector<int>& weights, int t, int width) {
    AbelianPolyMap out;
    out.weights = weights;
    out.degree = t;
    out.width = width;
    std::vector<std::vector<int>> ks;
    weighted_indices(weights, t, ks);
    // alpha_k = (-1)^{sum k} (prod partial^k) p(0), with partial = id - shift
    for (const auto& k : ks) {
        // iterated differences evaluated at 0 expand inclusion-exclusion
        // over sub-multi-indices; direct expansion keeps it simple
        std::vector<int> j(k.size(), 0);
        std::vector<Rat> acc(width, Rat(0));
        std::function<void(size_t, int, long long)> rec = [&](size_t pos, int parity,
                                                              long long mult) {
            if (pos == k.size()) {
                auto val = p(j);
                Rat m = Rat(mult) * Rat(parity);
                for (int d = 0; d < width; d++) acc[d] += m * val[d];
                return;
            }
            for (int a = 0; a <= k[pos]; a++) {
                j[pos] = a;
                long long ch = 1;
                for (int i = 0; i < a; i++) ch = ch * (k[pos] - i) / (i + 1);
                rec(pos + 1, (a & 1) ? -parity : parity, mult * ch);
            }
            j[pos] = 0;
        };
        // (id - shift)^{k_i} applied per coordinate, evaluated at zero:
        // sum over a <= k of (-1)^{|a|} C(k,a) p(a); the global sign
        // (-1)^{sum k} then cancels against the parity bookkeeping
        rec(0, 1, 1);
        int total = 0;
        for (int v : k) total += v;
        if (total & 1)
            for (auto& v : acc) v = -v;
        bool nonzero = false;
        for (auto& v : acc)
            if (!v.is_zero()) nonzero = true;
        if (nonzero || total == 0) out.alpha[k] = std::move(acc);
    }
    // consistency: the fit must reproduce the table on a covering box
    std::vector<int> maxv(weights.size());
    for (size_t i = 0; i < weights.size(); i++) maxv[i] = t / weights[i] + 1;
    std::vector<int> v(weights.size(), 0);
    std::function<bool(size_t)> walk = [&](size_t pos) -> bool {
        if (pos == v.size()) {
            std::vector<Rat> vr(v.size());
            for (size_t i = 0; i < v.size(); i++) vr[i] = Rat(v[i]);
            auto fitted = out.eval(vr);
            auto truth = p(v);
            for (int d = 0; d < out.width; d++)
                if (!(fitted[d] == truth[d])) return false;
            return true;
        }
        for (v[pos] = 0; v[pos] <= maxv[pos]; v[pos]++)
            if (!walk(pos + 1)) return false;
        v[pos] = 0;
        return true;
    };
    if (!walk(0)) {
        std::ostringstream os;
        os << "taylor_fit: table exceeds weighted degree " << t << " (finite difference at";
        for (int x : v) os << ' ' << x;
        os << " violated)";
        throw ArgumentError(os.str());
    }
    return out;
}

bool poly_degree_check(const std::function<Elt(const std::vector<int>&)>& p,
                       const std::vector<int>& source_weights, const Presentation& target,
                       int box_radius) {
    size_t A = source_weights.size();
    // shifts are unit vectors carrying their coordinate weight
    std::function<bool(std::vector<std::pair<size_t, int>>&, int)> try_deriv =
        [&](std::vector<std::pair<size_t, int>>& shifts, int total_weight) -> bool {
        if (total_weight > target.degree() + 1) return true;
        if (!shifts.empty()) {
            // evaluate the iterated group derivative on a small box
            std::vector<int> x(A, -box_radius);
            bool done = false;
            while (!done) {
                std::function<Elt(size_t, std::vector<int>)> dval = [&](size_t d,
                                                                        std::vector<int> base) -> Elt {
                    if (d == shifts.size()) return p(base);
                    Elt at = dval(d + 1, base);
                    base[shifts[d].first] += 1;
                    Elt shifted = dval(d + 1, base);
                    return target.multiply(at, target.inverse(shifted));
                };
                Elt der = dval(0, x);
                if (target.filtration_level(der) < std::min(total_weight, target.degree() + 1))
                    return false;
                for (size_t i = 0;; i++) {
                    if (i == A) {
                        done = true;
                        break;
                    }
                    if (++x[i] <= box_radius) break;
                    x[i] = -box_radius;
                }
            }
        }
        for (size_t a = 0; a < A; a++) {
            shifts.emplace_back(a, source_weights[a]);
            if (!try_deriv(shifts, total_weight + source_weights[a])) return false;
            shifts.pop_back();
        }
        return true;
    };
    std::vector<std::pair<size_t, int>> shifts;
    return try_deriv(shifts, 0);
}

HkDecomposition hk_decompose(const Presentation& G, const VertexLabelling<Elt>& c) {
    int k = c.k;
    HkDecomposition out;
    out.exponents.resize(G.degree());
    VertexLabelling<Elt> r = c;
    for (int lev = 1; lev <= G.degree(); lev++) {
        int d = G.dims()[lev - 1], off = G.level_offset(lev);
        // Moebius coefficients of the level slice
        std::vector<std::vector<Rat>> chat(size_t(1) << k, std::vector<Rat>(d));
        for (uint32_t eta = 0; eta < (1u << k); eta++) {
            for (uint32_t w = 0; w < (1u << k); w++) {
                if ((w & eta) != w) continue;
                int sgn = ((popcount32(eta) - popcount32(w)) & 1) ? -1 : 1;
                for (int j = 0; j < d; j++)
                    chat[eta][j] += Rat(sgn) * r[w][off + j];
            }
        }
        for (uint32_t eta = 0; eta < (1u << k); eta++) {
            if (popcount32(eta) <= lev) continue;
            for (int j = 0; j < d; j++) {
                if (!chat[eta][j].is_zero()) {
                    out.is_cube = false;
                    out.fail_level = lev;
                    out.fail_eta = eta;
                    return out;
                }
            }
        }
        for (uint32_t eta = 0; eta < (1u << k); eta++) {
            if (popcount32(eta) > lev) continue;
            bool nz = false;
            for (int j = 0; j < d; j++)
                if (!chat[eta][j].is_zero()) nz = true;
            if (nz) out.exponents[lev - 1][eta] = chat[eta];
        }
        // divide off the canonical level part
        for (uint32_t w = 0; w < (1u << k); w++) {
            Elt u(G.dim());
            for (int j = 0; j < d; j++) u[off + j] = r[w][off + j];
            r[w] = G.multiply(G.inverse(u), r[w]);
        }
    }
    for (uint32_t w = 0; w < (1u << k); w++) {
        if (G.filtration_level(r[w]) <= G.degree()) {
            out.is_cube = false;
            out.fail_level = G.degree() + 1;
            out.fail_eta = w;
            return out;
        }
    }
    out.is_cube = true;
    return out;
}

VertexLabelling<Elt> hk_compose(const Presentation& G,
                                const std::vector<std::map<uint32_t, std::vector<Rat>>>& exponents,
                                int k) {
    VertexLabelling<Elt> out(k);
    for (uint32_t w = 0; w < (1u << k); w++) out[w] = G.identity();
    for (int lev = 1; lev <= G.degree(); lev++) {
        int d = G.dims()[lev - 1], off = G.level_offset(lev);
        for (uint32_t w = 0; w < (1u << k); w++) {
            Elt u(G.dim());
            if (lev - 1 < (int)exponents.size()) {
                for (const auto& [eta, vals] : exponents[lev - 1]) {
                    if ((w & eta) != eta) continue;  // upper-face support
                    for (int j = 0; j < d; j++) u[off + j] += vals[j];
                }
            }
            out[w] = G.multiply(out[w], u);
        }
    }
    return out;
}

HkLift hk_lift(const Presentation& G, const VertexLabelling<Elt>& reps) {
    int k = reps.k;
    HkLift out;
    VertexLabelling<Elt> r = reps;
    std::vector<std::map<uint32_t, std::vector<Rat>>> exps(G.degree());
    for (int lev = 1; lev <= G.degree(); lev++) {
        int d = G.dims()[lev - 1], off = G.level_offset(lev);
        std::vector<std::vector<Rat>> chat(size_t(1) << k, std::vector<Rat>(d));
        for (uint32_t eta = 0; eta < (1u << k); eta++)
            for (uint32_t w = 0; w < (1u << k); w++) {
                if ((w & eta) != w) continue;
                int sgn = ((popcount32(eta) - popcount32(w)) & 1) ? -1 : 1;
                for (int j = 0; j < d; j++) chat[eta][j] += Rat(sgn) * r[w][off + j];
            }
        // high coefficients must be integral; integer parts move to Gamma
        std::vector<std::vector<Rat>> mhat(size_t(1) << k, std::vector<Rat>(d));
        for (uint32_t eta = 0; eta < (1u << k); eta++) {
            for (int j = 0; j < d; j++) {
                if (popcount32(eta) > lev) {
                    if (!chat[eta][j].is_integer()) {
                        out.ok = false;
                        out.fail_level = lev;
                        out.fail_eta = eta;
                        return out;
                    }
                    mhat[eta][j] = -chat[eta][j];
                } else {
                    mhat[eta][j] = -Rat(chat[eta][j].floor());
                }
            }
        }
        for (uint32_t w = 0; w < (1u << k); w++) {
            Elt gam(G.dim()), u(G.dim());
            for (uint32_t eta = 0; eta < (1u << k); eta++) {
                if ((w & eta) != eta) continue;
                for (int j = 0; j < d; j++) gam[off + j] += mhat[eta][j];
            }
            Elt moved = G.multiply(r[w], gam);
            for (int j = 0; j < d; j++) u[off + j] = moved[off + j];
            r[w] = G.multiply(G.inverse(u), moved);
        }
        // record the adjusted coefficients on supports of weight <= lev
        for (uint32_t eta = 0; eta < (1u << k); eta++) {
            if (popcount32(eta) > lev) continue;
            std::vector<Rat> vals(d);
            bool nz = false;
            for (int j = 0; j < d; j++) {
                vals[j] = chat[eta][j] + mhat[eta][j];
                if (!vals[j].is_zero()) nz = true;
            }
            if (nz) exps[lev - 1][eta] = vals;
        }
    }
    out.lift = hk_compose(G, exps, k);
    // the lift projects onto the input cosets
    for (uint32_t w = 0; w < (1u << k); w++) {
        Elt diff = G.multiply(G.inverse(reps[w]), out.lift[w]);
        if (!G.integral(diff)) {
            out.ok = false;
            out.fail_level = 0;
            out.fail_eta = w;
            return out;
        }
    }
    out.ok = true;
    return out;
}

PolyBasis poly_basis_abelian(const Presentation& G, int t) {
    PolyBasis out;
    out.G = &G;
    out.t = t;
    std::vector<int> weights(G.dim());
    for (int c = 0; c < G.dim(); c++) weights[c] = G.level_of(c);
    weighted_indices(weights, t, out.indices);
    // constants first, then by weighted degree and index order
    std::sort(out.indices.begin(), out.indices.end(),
              [&](const std::vector<int>& a, const std::vector<int>& b) {
                  int wa = weighted_degree(weights, a), wb = weighted_degree(weights, b);
                  if (wa != wb) return wa < wb;
                  return a < b;
              });
    for (auto& k : out.indices) out.grade.push_back(t - weighted_degree(weights, k));
    return out;
}

Rat PolyBasis::eval(size_t which, const Elt& z) const {
    const auto& k = indices[which];
    Rat prod(1);
    for (size_t i = 0; i < k.size(); i++)
        if (k[i]) prod *= rat_binom(z[i], k[i]);
    return prod;
}

GroupLawPolynomials group_law_polynomials(const Presentation& G) {
    int D = G.dim();
    std::vector<int> w2(2 * D), w1(D);
    for (int c = 0; c < D; c++) {
        w1[c] = G.level_of(c);
        w2[c] = w2[D + c] = G.level_of(c);
    }
    GroupLawPolynomials out;
    out.product = taylor_fit(
        [&](const std::vector<int>& v) {
            Elt a(D), b(D);
            for (int c = 0; c < D; c++) {
                a[c] = Rat(v[c]);
                b[c] = Rat(v[D + c]);
            }
            return G.multiply(a, b);
        },
        w2, G.degree(), D);
    out.commutator = taylor_fit(
        [&](const std::vector<int>& v) {
            Elt a(D), b(D);
            for (int c = 0; c < D; c++) {
                a[c] = Rat(v[c]);
                b[c] = Rat(v[D + c]);
            }
            return G.commutator(a, b);
        },
        w2, G.degree(), D);
    out.inverse = taylor_fit(
        [&](const std::vector<int>& v) {
            Elt a(D);
            for (int c = 0; c < D; c++) a[c] = Rat(v[c]);
            return G.inverse(a);
        },
        w1, G.degree(), D);
    if (!out.product.integral_coefficients() || !out.commutator.integral_coefficients() ||
        !out.inverse.integral_coefficients())
        throw ArgumentError("group_law_polynomials: non-integer fitted coefficient");
    // round trip on fresh samples
    Rng rng(1234);
    for (int it = 0; it < 50; it++) {
        Elt a(D), b(D);
        std::vector<Rat> packed(2 * D);
        for (int c = 0; c < D; c++) {
            a[c] = Rat(rng.range(-5, 5));
            b[c] = Rat(rng.range(-5, 5));
            packed[c] = a[c];
            packed[D + c] = b[c];
        }
        if (!(out.product.eval(packed) == G.multiply(a, b)))
            throw Error("group_law_polynomials: product fit mismatch");
    }
    return out;
}

namespace {

// Taylor fit of a torus-valued table: the alpha formula is computed over
// the rationals, then canonically reduced to [0,1); consistency is checked
// modulo 1 (the raw coordinates of a coset map wrap, so the plain fit
// cannot apply).
AbelianPolyMap torus_taylor_fit(const std::function<std::vector<Rat>(const std::vector<int>&)>& p,
                                const std::vector<int>& weights, int t, int width) {
    AbelianPolyMap out;
    out.weights = weights;
    out.degree = t;
    out.width = width;
    std::vector<std::vector<int>> ks;
    weighted_indices(weights, t, ks);
    for (const auto& k : ks) {
        std::vector<int> j(k.size(), 0);
        std::vector<Rat> acc(width, Rat(0));
        std::function<void(size_t, int, long long)> rec = [&](size_t pos, int parity,
                                                              long long mult) {
            if (pos == k.size()) {
                auto val = p(j);
                Rat m = Rat(mult) * Rat(parity);
                for (int d = 0; d < width; d++) acc[d] += m * val[d];
                return;
            }
            for (int a = 0; a <= k[pos]; a++) {
                j[pos] = a;
                long long ch = 1;
                for (int i = 0; i < a; i++) ch = ch * (k[pos] - i) / (i + 1);
                rec(pos + 1, (a & 1) ? -parity : parity, mult * ch);
            }
            j[pos] = 0;
        };
        rec(0, 1, 1);
        int total = 0;
        for (int v : k) total += v;
        if (total & 1)
            for (auto& v : acc) v = -v;
        for (auto& v : acc) v = v.frac();
        bool nonzero = false;
        for (auto& v : acc)
            if (!v.is_zero()) nonzero = true;
        if (nonzero || total == 0) out.alpha[k] = std::move(acc);
    }
    // consistency mod 1 on the covering box
    std::vector<int> maxv(weights.size());
    for (size_t i = 0; i < weights.size(); i++) maxv[i] = t / weights[i] + 1;
    std::vector<int> v(weights.size(), 0);
    std::function<bool(size_t)> walk = [&](size_t pos) -> bool {
        if (pos == v.size()) {
            std::vector<Rat> vr(v.size());
            for (size_t i = 0; i < v.size(); i++) vr[i] = Rat(v[i]);
            auto fitted = out.eval(vr);
            auto truth = p(v);
            for (int d = 0; d < out.width; d++)
                if (!(fitted[d] - truth[d]).frac().is_zero()) return false;
            return true;
        }
        for (v[pos] = 0; v[pos] <= maxv[pos]; v[pos]++)
            if (!walk(pos + 1)) return false;
        v[pos] = 0;
        return true;
    };
    if (!walk(0)) throw ArgumentError("torus fit: table exceeds the stated degree");
    return out;
}

}  // namespace

ZLift z_lift(const Presentation& G, const std::function<Elt(const std::vector<int>&)>& coset_rep,
             int source_dim, int box_radius) {
    std::vector<int> weights(source_dim, 1);
    ZLift out;
    out.level_data.resize(G.degree());

    // residual after stripping the lifted lower levels
    auto residual = [&](const std::vector<int>& x, int upto_level) {
        Elt acc = G.identity();
        for (int lev = 1; lev <= upto_level; lev++) {
            std::vector<Rat> xr(x.size());
            for (size_t i = 0; i < x.size(); i++) xr[i] = Rat(x[i]);
            auto vals = out.level_data[lev - 1].eval(xr);
            Elt u(G.dim());
            for (int j = 0; j < G.dims()[lev - 1]; j++) u[G.level_offset(lev) + j] = vals[j];
            acc = G.multiply(acc, u);
        }
        return G.multiply(G.inverse(acc), coset_rep(x));
    };

    for (int lev = 1; lev <= G.degree(); lev++) {
        int d = G.dims()[lev - 1], off = G.level_offset(lev);
        // level slice mod 1 is polynomial of degree at most lev
        out.level_data[lev - 1] = torus_taylor_fit(
            [&](const std::vector<int>& x) {
                Elt q = residual(x, lev - 1);
                std::vector<Rat> vals(d);
                for (int j = 0; j < d; j++) vals[j] = q[off + j].frac();
                return vals;
            },
            weights, lev, d);
        // the lifted data covers the coset map on the verification box
        std::vector<int> x(source_dim, -box_radius);
        bool done = false;
        while (!done) {
            Elt q = residual(x, lev);
            for (int j = 0; j < d; j++)
                if (!q[off + j].is_integer())
                    throw Error("z_lift: level data does not cover the coset map");
            for (int i = 0;; i++) {
                if (i == source_dim) {
                    done = true;
                    break;
                }
                if (++x[i] <= box_radius) break;
                x[i] = -box_radius;
            }
        }
    }

    out.eval = [&G, lifted = out.level_data](const std::vector<int>& x) {
        Elt acc = G.identity();
        for (int lev = 1; lev <= G.degree(); lev++) {
            std::vector<Rat> xr(x.size());
            for (size_t i = 0; i < x.size(); i++) xr[i] = Rat(x[i]);
            auto vals = lifted[lev - 1].eval(xr);
            Elt u(G.dim());
            for (int j = 0; j < (int)vals.size(); j++) u[G.level_offset(lev) + j] = vals[j];
            acc = G.multiply(acc, u);
        }
        return acc;
    };
    return out;
}

Rat NilPoly::eval(uint64_t x) const {
    return F.eval(r[x])[0];
}

Presentation bracket_presentation() { return builtin_abelian({2, 0}); }

NilPoly builtin_bracket(const FiniteGroupSpec& H, long long alpha, long long beta,
                        const Presentation& storage) {
    NilPoly np;
    np.G = &storage;
    np.H = &H;
    long long N = H.modulus();
    np.r.resize(H.order());
    for (uint64_t x = 0; x < H.order(); x++) {
        Elt e(storage.dim());
        e[0] = Rat((long long)((alpha * (long long)x) % N + N) % N, N);
        e[1] = Rat((long long)((beta * (long long)x) % N + N) % N, N);
        np.r[x] = e;
    }
    np.F.weights = {1, 1};
    np.F.degree = 2;
    np.F.width = 1;
    np.F.alpha[{1, 1}] = {Rat(1)};
    return np;
}

Cplx Nilsequence::eval(uint64_t x) const {
    auto [h, gamma] = G->reduce_fundamental(orbit[x]);
    double t = 0;
    for (size_t i = 0; i < frequencies.size() && i < h.size(); i++)
        t += frequencies[i] * h[i].to_double();
    return Cplx(std::cos(6.283185307179586 * t), std::sin(6.283185307179586 * t));
}

double Nilsequence::measured_lipschitz_ratio(Rng& rng, int samples) const {
    double worst = 0;
    for (int it = 0; it < samples; it++) {
        uint64_t x = rng.below(H->order()), y = rng.below(H->order());
        if (x == y) continue;
        auto [hx, gx] = G->reduce_fundamental(orbit[x]);
        auto [hy, gy] = G->reduce_fundamental(orbit[y]);
        double dist = 0;
        for (int c = 0; c < G->dim(); c++) dist += (hx[c] - hy[c]).abs().to_double();
        if (dist <= 0) continue;
        double df = std::abs(eval(x) - eval(y));
        worst = std::max(worst, df / dist);
    }
    return lipschitz > 0 ? worst / lipschitz : worst;
}

NilDerivCorrection nil_deriv_correction(const NilPoly& np, const AbelianPolyMap& F_prime,
                                        const CubeConfig& c) {
    const Presentation& G = *np.G;
    int k = c.dim();
    VertexLabelling<Elt> reps(k);
    for (uint32_t w = 0; w < (1u << k); w++) reps[w] = np.r[c.vertex(w)];
    HkLift lift = hk_lift(G, reps);
    if (!lift.ok)
        throw ContractError("nil_deriv_correction: orbit configuration is not a nilmanifold cube");
    NilDerivCorrection out;
    out.gamma.resize(size_t(1) << k);
    out.lhs = Rat(0);
    out.rhs = Rat(0);
    for (uint32_t w = 0; w < (1u << k); w++) {
        out.gamma[w] = G.multiply(G.inverse(reps[w]), lift.lift[w]);
        if (!G.integral(out.gamma[w]))
            throw Error("nil_deriv_correction: correction is not in the lattice");
        Rat fval = F_prime.eval(reps[w])[0];
        Rat fshift = F_prime.eval(G.multiply(reps[w], out.gamma[w]))[0];
        Rat term = fval - fshift;
        out.lhs = (popcount32(w) & 1) ? out.lhs - fval : out.lhs + fval;
        out.rhs = (popcount32(w) & 1) ? out.rhs - term : out.rhs + term;
    }
    if (!(out.lhs == out.rhs))
        throw Error("nil_deriv_correction: correction identity failed");
    return out;
}

NilHierarchy nil_to_hierarchy(const NilPoly& np) {
    const Presentation& G = *np.G;
    const FiniteGroupSpec& H = *np.H;
    int s = np.F.degree;
    std::vector<int> weights(G.dim());
    for (int c = 0; c < G.dim(); c++) weights[c] = G.level_of(c);

    PolyBasis basis = poly_basis_abelian(G, s);
    auto windex = [&](const std::vector<int>& k) { return weighted_degree(weights, k); };
    std::map<std::vector<int>, size_t> basis_pos;
    for (size_t i = 0; i < basis.indices.size(); i++) basis_pos[basis.indices[i]] = i;

    // hierarchy members: pairs (k with nonzero alpha, k' of strictly lower
    // weighted degree), graded by w(k')
    struct Pair {
        std::vector<int> k, kp;
        Rat alpha_k;
        int level;  // w(k')
    };
    std::vector<Pair> pairs;
    for (const auto& [k, a] : np.F.alpha) {
        if (a[0].is_zero()) continue;
        int wk = windex(k);
        if (wk == 0) continue;
        for (const auto& kp : basis.indices) {
            if (windex(kp) < wk) pairs.push_back({k, kp, a[0], windex(kp)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.level != b.level) return a.level < b.level;
        if (a.k != b.k) return a.k < b.k;
        return a.kp < b.kp;
    });

    NilHierarchy out;
    out.hierarchy.G = &H;
    out.hierarchy.s = s - 1;
    out.hierarchy.dims.assign(s, 0);
    out.hierarchy.fns.assign(s, {});
    out.hierarchy.b.assign(s, {});
    std::map<std::pair<std::vector<int>, std::vector<int>>, int> slot_of;  // (k,k') -> index in level
    for (const auto& P : pairs) {
        slot_of[{P.k, P.kp}] = out.hierarchy.dims[P.level];
        out.hierarchy.dims[P.level]++;
        RealFn f(H);
        for (uint64_t x = 0; x < H.order(); x++) f[x] = P.alpha_k * basis.eval(basis_pos[P.kp], np.r[x]);
        out.hierarchy.fns[P.level].push_back(std::move(f));
    }
    out.hierarchy.host = CubeSystem::full(H, s - 1, Rat(1));

    // tau-expansion coefficients of each basis element under right shift by
    // gamma, cached per lattice element
    std::unordered_map<std::string, std::vector<std::vector<Rat>>> shift_cache;
    auto shift_matrix = [&](const Elt& gamma) -> const std::vector<std::vector<Rat>>& {
        std::string key = elt_key(gamma);
        auto it = shift_cache.find(key);
        if (it != shift_cache.end()) return it->second;
        std::vector<std::vector<Rat>> mat(basis.indices.size(),
                                          std::vector<Rat>(basis.indices.size(), Rat(0)));
        for (size_t bi = 0; bi < basis.indices.size(); bi++) {
            int wk = windex(basis.indices[bi]);
            AbelianPolyMap fitted = taylor_fit(
                [&](const std::vector<int>& v) {
                    Elt z(G.dim());
                    for (int c = 0; c < G.dim(); c++) z[c] = Rat(v[c]);
                    return std::vector<Rat>{basis.eval(bi, G.multiply(z, gamma))};
                },
                weights, wk, 1);
            for (const auto& [kp, aval] : fitted.alpha) {
                if (aval[0].is_zero()) continue;
                auto pos = basis_pos.find(kp);
                if (pos == basis_pos.end()) throw Error("nil_to_hierarchy: index escape");
                if (!aval[0].is_integer())
                    throw Error("nil_to_hierarchy: non-integer shift coefficient");
                mat[bi][pos->second] = aval[0];
            }
            // leading coefficient is 1, same-weight off-diagonal vanishes
            if (!(mat[bi][bi] == Rat(1)))
                throw Error("nil_to_hierarchy: shift does not fix the leading term");
            for (size_t bj = 0; bj < basis.indices.size(); bj++)
                if (bj != bi && windex(basis.indices[bj]) == wk && !mat[bi][bj].is_zero())
                    throw Error("nil_to_hierarchy: same-weight off-diagonal shift term");
        }
        return shift_cache.emplace(key, std::move(mat)).first->second;
    };

    long long max_coeff = 1;

    // coefficients for one function F' = alpha_k q_{k0} at a cube of
    // dimension t+1 (t = w(k0)), referencing pairs (k, .)
    auto make_rows = [&](const std::vector<int>& k, const std::vector<int>& k0,
                         const CubeConfig& c, int deg) {
        int verts = 1 << c.dim();
        int width = 0;
        for (int lev = 0; lev < deg; lev++) width += out.hierarchy.dims[lev];
        std::vector<std::vector<long long>> rows(verts, std::vector<long long>(width, 0));
        VertexLabelling<Elt> reps(c.dim());
        for (uint32_t w = 0; w < (uint32_t)verts; w++) reps[w] = np.r[c.vertex(w)];
        HkLift lift = hk_lift(G, reps);
        if (!lift.ok) throw ContractError("nil_to_hierarchy: orbit fails cube membership");
        size_t b0 = basis_pos[k0];
        for (uint32_t w = 0; w < (uint32_t)verts; w++) {
            Elt gamma = G.multiply(G.inverse(reps[w]), lift.lift[w]);
            const auto& mat = shift_matrix(gamma);
            for (size_t bj = 0; bj < basis.indices.size(); bj++) {
                if (bj == b0) continue;
                const Rat& coeff = mat[b0][bj];
                if (coeff.is_zero()) continue;
                int lev = windex(basis.indices[bj]);
                if (lev >= deg) throw Error("nil_to_hierarchy: coefficient above the degree");
                auto slot = slot_of.find({k, basis.indices[bj]});
                if (slot == slot_of.end()) throw Error("nil_to_hierarchy: missing hierarchy member");
                int off = 0;
                for (int l = 0; l < lev; l++) off += out.hierarchy.dims[l];
                long long ci = -coeff.num().to_i64();
                rows[w][off + slot->second] += ci;
                max_coeff = std::max(max_coeff, std::llabs(rows[w][off + slot->second]));
            }
        }
        return rows;
    };

    // witnesses for every hierarchy member, in the same order the functions
    // were pushed (pairs are already sorted by level)
    for (const auto& P : pairs) {
        int lev = P.level;
        BCoeffs bc;
        bc.k = lev + 1;
        bc.t = lev;
        bc.dims.assign(out.hierarchy.dims.begin(), out.hierarchy.dims.begin() + lev);
        CubeIndexer idx{&H, lev + 1};
        for (uint64_t ci = 0; ci < idx.size(); ci++)
            bc.data.emplace(ci, make_rows(P.k, P.kp, idx.cube(ci), lev));
        out.hierarchy.b[lev].push_back(std::move(bc));
    }

    // the top condition for g = F o r
    out.g = RealFn(H);
    for (uint64_t x = 0; x < H.order(); x++) out.g[x] = np.F.eval(np.r[x])[0];
    out.b.k = s + 1;
    out.b.t = s;
    out.b.dims = out.hierarchy.dims;
    {
        CubeIndexer idx{&H, s + 1};
        int width = 0;
        for (int lev = 0; lev < s; lev++) width += out.hierarchy.dims[lev];
        for (uint64_t ci = 0; ci < idx.size(); ci++) {
            CubeConfig c = idx.cube(ci);
            int verts = 1 << (s + 1);
            std::vector<std::vector<long long>> rows(verts, std::vector<long long>(width, 0));
            VertexLabelling<Elt> reps(s + 1);
            for (uint32_t w = 0; w < (uint32_t)verts; w++) reps[w] = np.r[c.vertex(w)];
            HkLift lift = hk_lift(G, reps);
            if (!lift.ok) throw ContractError("nil_to_hierarchy: orbit fails cube membership");
            for (uint32_t w = 0; w < (uint32_t)verts; w++) {
                Elt gamma = G.multiply(G.inverse(reps[w]), lift.lift[w]);
                const auto& mat = shift_matrix(gamma);
                for (const auto& [k, aval] : np.F.alpha) {
                    if (aval[0].is_zero() || windex(k) == 0) continue;
                    size_t bk = basis_pos[k];
                    for (size_t bj = 0; bj < basis.indices.size(); bj++) {
                        if (bj == bk) continue;
                        const Rat& coeff = mat[bk][bj];
                        if (coeff.is_zero()) continue;
                        int lev = windex(basis.indices[bj]);
                        auto slot = slot_of.find({k, basis.indices[bj]});
                        if (slot == slot_of.end())
                            throw Error("nil_to_hierarchy: missing hierarchy member");
                        int off = 0;
                        for (int l = 0; l < lev; l++) off += out.hierarchy.dims[l];
                        rows[w][off + slot->second] += -coeff.num().to_i64();
                        max_coeff =
                            std::max(max_coeff, std::llabs(rows[w][off + slot->second]));
                    }
                }
            }
            out.b.data.emplace(ci, std::move(rows));
        }
    }
    out.max_coeff = max_coeff;
    out.hierarchy.M = Rat(max_coeff);

    // full verification: the hierarchy and the top condition hold exactly
    if (!verify_hierarchy(out.hierarchy)) throw Error("nil_to_hierarchy: member condition failed");
    Bitset full(CubeIndexer{&H, s + 1}.size(), true);
    DerivCheck chk =
        verify_deriv_condition(out.g, out.hierarchy, out.b, full, s + 1, s, out.hierarchy.M);
    if (!chk.holds) throw Error("nil_to_hierarchy: top derivatives condition failed");
    return out;
}

}  // namespace hofa
