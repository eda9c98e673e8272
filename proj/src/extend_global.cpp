#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "hofa/approx_poly.hpp"
#include "hofa/util.hpp"

namespace hofa {

namespace {

// Graph on the distinct translate values at a fixed base point.
struct LocalView {
    std::vector<uint64_t> values;   // distinct translate values v with x+v in S_0
    std::vector<int> comp;          // component ids
    std::vector<int> bfs_parent;    // BFS forest (indices into values)
    bool usable = false;            // nonempty and connected
};

struct Samples {
    std::vector<uint64_t> avals;          // distinct translate values, z_1 = 0 first
    std::vector<uint64_t> first_index;    // 1-based first occurrence of avals[i]
    std::vector<uint64_t> tvals;          // T = {0, h_1, ...} distinct, in draw order
    std::vector<uint64_t> sumset;         // (s+1)-fold sumset of T
};

Samples draw_samples(const FiniteGroupSpec& G, uint64_t L, int s, Rng& rng) {
    Samples out;
    uint64_t n = G.order();
    // first translate is pinned to zero (global translation in the proof)
    uint64_t a1 = rng.below(n);
    std::vector<long long> first_of(n, -1);
    out.avals.push_back(0);
    out.first_index.push_back(1);
    first_of[0] = 0;
    for (uint64_t i = 2; i <= L && out.avals.size() < n; i++) {
        uint64_t z = G.sub(rng.below(n), a1);
        if (first_of[z] < 0) {
            first_of[z] = (long long)out.avals.size();
            out.avals.push_back(z);
            out.first_index.push_back(i);
        }
    }
    std::vector<uint8_t> seen_t(n, 0);
    out.tvals.push_back(0);
    seen_t[0] = 1;
    for (uint64_t i = 1; i <= L && out.tvals.size() < n; i++) {
        uint64_t h = rng.below(n);
        if (!seen_t[h]) {
            seen_t[h] = 1;
            out.tvals.push_back(h);
        }
    }
    // (s+1)-fold sumset of T
    std::vector<uint8_t> cur(n, 0);
    cur[0] = 1;
    for (int r = 0; r < s + 1; r++) {
        std::vector<uint8_t> nxt(n, 0);
        for (uint64_t x = 0; x < n; x++)
            if (cur[x])
                for (uint64_t t : out.tvals) nxt[G.add(x, t)] = 1;
        cur = std::move(nxt);
    }
    for (uint64_t x = 0; x < n; x++)
        if (cur[x]) out.sumset.push_back(x);
    return out;
}

// key for the difference function g_{a,b} = f(.+a) - f(.+b): canonical
// ordering a < b, with sign -1 when flipped
struct PairColumns {
    const FiniteGroupSpec* G;
    std::unordered_map<uint64_t, int> col_of;
    std::vector<std::pair<uint64_t, uint64_t>> pairs;

    // returns (column, sign); a != b required
    std::pair<int, int> get(uint64_t a, uint64_t b) {
        int sign = 1;
        if (a > b) {
            std::swap(a, b);
            sign = -1;
        }
        uint64_t key = a * G->order() + b;
        auto it = col_of.find(key);
        if (it == col_of.end()) {
            it = col_of.emplace(key, (int)pairs.size()).first;
            pairs.emplace_back(a, b);
        }
        return {it->second, sign};
    }
};

using SparseRow = std::map<int, long long>;

}  // namespace

ExtendGlobalResult extend_global(const RealFn& f, const CubeSystem& S, const Rat& eps,
                                 uint64_t seed, int retry_budget) {
    const FiniteGroupSpec& G = *f.G;
    const int s = S.s;
    const uint64_t n = G.order();
    if (s < 1) throw ArgumentError("extend_global: degree must be >= 1");
    for (uint64_t x = 0; x < n; x++)
        if (S.levels[0].get(x) && !f.is_defined(x))
            throw ContractError("extend_global: f undefined on S_0");

    {
        RatOps ops;
        auto idxt = S.indexer(s + 1);
        for (uint64_t i = 0; i < idxt.size(); i++)
            if (S.levels[s + 1].get(i) &&
                !ops.eq(derivative(ops, f.v, idxt.cube(i)), ops.zero()))
                throw ContractError("extend_global: derivative does not vanish on S_{s+1}");
    }
    Graph g0 = component_graph(S);
    CheegerResult ch = cheeger(g0);
    if (!ch.infinite && ch.H.is_zero())
        throw ArgumentError("extend_global: the S_1 graph must be connected");
    double h = ch.infinite ? 1.0 : std::min(1.0, ch.h.to_double());
    double delta = S.delta.to_double();
    if (delta <= 0) throw ArgumentError("extend_global: system parameter must be positive");
    double epsd = std::max(eps.to_double(), 1e-12);

    // least L satisfying the four sampling conditions
    auto ok = [&](double L) {
        double rhsAB = std::pow(2.0, -(double)(s + 1)) * (epsd / 40.0) * std::pow(L + 1, -(double)(s + 1));
        double rhsC = std::pow(2.0, -(double)(s + 1)) * (epsd / 20.0) * std::pow(L + 1, -(double)(s + 1));
        double hterm = std::pow(h, 4.0) / (64.0 * std::log(2.0 / (h * h)));
        if (h >= 1.0) hterm = 1.0 / 64.0;
        bool A = std::exp(-delta * L / 8.0) <= rhsAB;
        bool B = (L / 2.0 + 1.0) * std::exp(-(delta * L / 2.0 - 1.0) * hterm) <= rhsAB;
        bool C = 2.0 * std::exp(-delta * (L - 1.0) / 2.0) <= rhsC;
        bool D = (double)(s + 1) * std::exp(-delta * L) <= epsd / 10.0;
        return A && B && C && D;
    };
    double Ld = 1;
    while (Ld < 1e15 && !ok(Ld)) Ld *= 2;
    if (!ok(Ld)) throw ArgumentError("extend_global: no feasible translate count");
    double lo = Ld / 2 + 1, hi = Ld;
    while (lo < hi) {
        double mid = std::floor(lo + (hi - lo) / 2);
        if (ok(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    uint64_t L = (uint64_t)lo;

    Rng rng(seed);
    std::string last_fail = "no attempt made";
    for (int attempt = 1; attempt <= retry_budget; attempt++) {
        Samples smp = draw_samples(G, L, s, rng);
        const auto& avals = smp.avals;
        const size_t A = avals.size();

        // local graphs per base point
        std::vector<LocalView> local(n);
        std::vector<long long> least_idx(n, -1);  // position in avals of the least valid index
        for (uint64_t x = 0; x < n; x++) {
            LocalView& lv = local[x];
            std::vector<int> pos_of(A, -1);
            for (size_t i = 0; i < A; i++) {
                if (S.levels[0].get(G.add(x, avals[i]))) {
                    pos_of[i] = (int)lv.values.size();
                    lv.values.push_back(avals[i]);
                }
            }
            if (lv.values.empty()) continue;
            // least first-occurrence index among valid values
            uint64_t best = ~0ull;
            long long besti = -1;
            for (size_t i = 0; i < A; i++)
                if (pos_of[i] >= 0 && smp.first_index[i] < best) {
                    best = smp.first_index[i];
                    besti = pos_of[i];
                }
            least_idx[x] = besti;
            // edges among valid values
            size_t m = lv.values.size();
            std::vector<std::vector<int>> adj(m);
            auto idx1 = S.indexer(1);
            for (size_t p = 0; p < m; p++)
                for (size_t q = 0; q < m; q++) {
                    if (p == q) continue;
                    CubeConfig e(G, G.add(x, lv.values[p]),
                                 {G.sub(lv.values[q], lv.values[p])});
                    if (S.levels[1].get(idx1.index(e))) adj[p].push_back((int)q);
                }
            lv.comp.assign(m, -1);
            lv.bfs_parent.assign(m, -1);
            int cid = 0;
            for (size_t root = 0; root < m; root++) {
                if (lv.comp[root] >= 0) continue;
                std::vector<int> queue = {(int)root};
                lv.comp[root] = cid;
                for (size_t qi = 0; qi < queue.size(); qi++) {
                    int uu = queue[qi];
                    for (int w : adj[uu]) {
                        if (lv.comp[w] < 0) {
                            lv.comp[w] = cid;
                            lv.bfs_parent[w] = uu;
                            queue.push_back(w);
                        }
                    }
                }
                cid++;
            }
            lv.usable = (cid == 1);
        }

        std::vector<uint8_t> X0(n, 0);
        for (uint64_t x = 0; x < n; x++) X0[x] = local[x].usable ? 1 : 0;

        // f'(x) = f(x + value at the least valid index)
        RealFn fprime(G);
        fprime.defined.assign(n, 0);
        for (uint64_t x = 0; x < n; x++) {
            if (!X0[x]) continue;
            fprime.defined[x] = 1;
            fprime.v[x] = f[G.add(x, local[x].values[least_idx[x]])];
        }

        // X1: hop pairs exist for every shift in the sumset
        auto idx1 = S.indexer(1);
        std::vector<uint8_t> X1(n, 0);
        // hop_pick[x * n + t] caches the chosen (k,l) pair, packed
        std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> hop_pick;
        for (uint64_t x = 0; x < n; x++) {
            bool good = true;
            for (uint64_t t : smp.sumset) {
                bool found = false;
                for (size_t p = 0; p < A && !found; p++) {
                    uint64_t u = G.add(x, avals[p]);
                    if (!S.levels[0].get(u)) continue;
                    for (size_t q = 0; q < A && !found; q++) {
                        uint64_t v = G.add(G.add(x, avals[q]), t);
                        CubeConfig e(G, u, {G.sub(v, u)});
                        if (S.levels[1].get(idx1.index(e))) {
                            hop_pick[x * n + t] = {avals[p], avals[q]};
                            found = true;
                        }
                    }
                }
                if (!found) {
                    good = false;
                    break;
                }
            }
            X1[x] = good ? 1 : 0;
        }

        std::vector<uint8_t> X2(n, 0);
        for (uint64_t x = 0; x < n; x++) {
            if (!X1[x]) continue;
            bool good = true;
            for (uint64_t t : smp.sumset)
                if (!X0[G.add(x, t)]) {
                    good = false;
                    break;
                }
            X2[x] = good ? 1 : 0;
        }

        uint64_t x2count = 0;
        for (uint64_t x = 0; x < n; x++) x2count += X2[x];
        Rat muX(Rat((long long)x2count) / Rat((long long)n));
        if (muX < Rat(1) - eps) {
            last_fail = "mu(X) below 1 - eps";
            continue;
        }

        // assemble the certified cube set and the coefficients
        PairColumns cols{&G, {}, {}};
        CubeIndexer idxs1{&G, s + 1};
        Bitset Scubes(idxs1.size());
        std::unordered_map<uint64_t, std::vector<SparseRow>> braw;

        // path from the least-index value to target value in the local graph;
        // emits +1 on g_{a_p, a_q} steps (value pairs), evaluated at shift
        auto emit_path = [&](uint64_t y, uint64_t target_value, uint64_t shift, int outer_sign,
                             SparseRow& row) {
            const LocalView& lv = local[y];
            int tpos = -1, spos = local[y].values.empty() ? -1 : (int)least_idx[y];
            for (size_t p = 0; p < lv.values.size(); p++)
                if (lv.values[p] == target_value) tpos = (int)p;
            if (tpos < 0 || spos < 0) throw Error("extend_global: path endpoint missing");
            // walk BFS parents from both endpoints to the root, then cancel
            auto chain = [&](int v) {
                std::vector<int> c = {v};
                while (lv.bfs_parent[c.back()] >= 0) c.push_back(lv.bfs_parent[c.back()]);
                return c;
            };
            std::vector<int> up_s = chain(spos), up_t = chain(tpos);
            // strip the common tail
            while (up_s.size() > 1 && up_t.size() > 1 &&
                   up_s[up_s.size() - 2] == up_t[up_t.size() - 2]) {
                up_s.pop_back();
                up_t.pop_back();
            }
            // f(y + a_s) - f(y + a_t) telescopes along up_s then down up_t
            std::vector<int> path = up_s;
            for (size_t i = up_t.size(); i-- > 0;) {
                if (!path.empty() && path.back() == up_t[i]) continue;
                path.push_back(up_t[i]);
            }
            for (size_t e = 0; e + 1 < path.size(); e++) {
                uint64_t va = lv.values[path[e]], vb = lv.values[path[e + 1]];
                auto [col, sgn] = cols.get(G.add(va, shift), G.add(vb, shift));
                row[col] += outer_sign * sgn;
            }
        };

        bool identity_ok = true;
        uint64_t scount = 0;
        std::vector<uint64_t> u(s + 1), tpick(s + 1);
        uint64_t ucount = 1;
        for (int i = 0; i <= s; i++) ucount *= n;
        for (uint64_t x = 0; x < n && identity_ok; x++) {
            if (!X2[x]) continue;
            for (uint64_t ui = 0; ui < ucount; ui++) {
                uint64_t tmp = ui;
                for (int i = s; i >= 0; i--) {
                    u[i] = tmp % n;
                    tmp /= n;
                }
                CubeConfig c(G, x, u);
                bool vertex_ok = true;
                for (uint32_t w = 1; w < (2u << s) && vertex_ok; w++)
                    if (!X2[c.vertex(w)]) vertex_ok = false;
                if (!vertex_ok) continue;
                // anchor translate at the base point
                uint64_t ak = local[x].values[least_idx[x]];
                // greedy choice of t_1..t_{s+1} within T
                CubeConfig grown(G, G.add(x, ak), {});
                bool grew = true;
                for (int m = 0; m <= s && grew; m++) {
                    grew = false;
                    for (uint64_t t : smp.tvals) {
                        CubeConfig cand = extend_cube(grown, G.add(u[m], t));
                        if (S.levels[m + 1].get(S.indexer(m + 1).index(cand))) {
                            grown = cand;
                            tpick[m] = t;
                            grew = true;
                            break;
                        }
                    }
                }
                if (!grew) continue;
                // coefficients: term(w) = f'(c(w)) - f(c(w) + ak + t_w)
                std::vector<SparseRow> rows(2u << s);
                bool emitted = true;
                for (uint32_t w = 0; w < (2u << s) && emitted; w++) {
                    uint64_t tw = 0;
                    for (int i = 0; i <= s; i++)
                        if (w & (1u << i)) tw = G.add(tw, tpick[i]);
                    uint64_t y0 = c.vertex(w);
                    uint64_t y = G.add(y0, tw);
                    // part 2: f'(y) - f(y + ak): path from least(y) to ak at shift tw
                    emit_path(y, ak, tw, +1, rows[w]);
                    // part 1: f'(y0) - f'(y0 + tw) via the hop pair, unless tw = 0
                    if (tw != 0) {
                        auto hp = hop_pick.find(y0 * n + tw);
                        if (hp == hop_pick.end()) {
                            emitted = false;
                            break;
                        }
                        auto [ka, la] = hp->second;
                        // f(y0 + a_i0) - f(y0 + a_k')
                        emit_path(y0, ka, 0, +1, rows[w]);
                        // -(f(y + a_i1) - f(y + a_l')), values at shift tw
                        emit_path(y, la, tw, -1, rows[w]);
                        // + g_{a_k', a_l' + tw}(y0)
                        auto [col, sgn] = cols.get(ka, G.add(la, tw));
                        rows[w][col] += sgn;
                    }
                }
                if (!emitted) continue;
                uint64_t ci = idxs1.index(c);
                Scubes.set(ci);
                scount++;
                braw.emplace(ci, std::move(rows));
            }
        }

        Rat muS(Rat((long long)scount) / Rat((long long)idxs1.size()));
        if (muS < Rat(1) - eps) {
            last_fail = "mu(S) below 1 - eps";
            continue;
        }

        // materialize the result
        ExtendGlobalResult out;
        out.L = L;
        out.attempts = attempt;
        out.X = X2;
        out.mu_X = muX;
        out.mu_S = muS;
        out.f_tilde = fprime;
        out.f_tilde.defined = X2;
        out.S = Scubes;
        out.K = (long long)cols.pairs.size();
        out.g_shift = cols.pairs;
        out.b.k = s + 1;
        out.b.t = s;
        out.b.dims.assign(s, 0);
        out.b.dims[s - 1] = (int)cols.pairs.size();
        long long maxnorm = 0;
        for (auto& [ci, rows] : braw) {
            std::vector<std::vector<long long>> dense(rows.size(),
                                                      std::vector<long long>((size_t)out.K, 0));
            for (uint32_t w = 0; w < rows.size(); w++) {
                long long nrm = 0;
                for (auto& [col, coef] : rows[w]) {
                    dense[w][col] = coef;
                    nrm += coef < 0 ? -coef : coef;
                }
                maxnorm = std::max(maxnorm, nrm);
            }
            out.b.data.emplace(ci, std::move(dense));
        }
        out.M = maxnorm;

        for (auto& [a, bshift] : cols.pairs) {
            RealFn gr(G);
            gr.defined.assign(n, 0);
            CubeSystem sys(G, s - 1);
            sys.delta = S.delta;
            for (int k = 0; k <= s; k++) {
                auto idxk = sys.indexer(k);
                auto idxk1 = S.indexer(k + 1);
                for (uint64_t i = 0; i < idxk.size(); i++) {
                    CubeConfig ck = idxk.cube(i);
                    std::vector<uint64_t> glued = ck.h;
                    glued.push_back(G.sub(bshift, a));
                    CubeConfig big(G, G.add(ck.x, a), glued);
                    if (S.levels[k + 1].get(idxk1.index(big))) sys.levels[k].set(i);
                }
            }
            for (uint64_t z = 0; z < n; z++) {
                if (!sys.levels[0].get(z)) continue;
                gr.defined[z] = 1;
                gr.v[z] = f[G.add(z, a)] - f[G.add(z, bshift)];
            }
            out.g.push_back(std::move(gr));
            out.g_systems.push_back(std::move(sys));
        }

        // exact re-verification of every certified derivative identity
        RatOps ops;
        for (uint64_t ci = 0; ci < Scubes.size(); ci++) {
            if (!Scubes.get(ci)) continue;
            CubeConfig c = idxs1.cube(ci);
            Rat lhs = derivative(ops, out.f_tilde.v, c);
            Rat rhs(0);
            const auto& rows = out.b.data.at(ci);
            for (uint32_t w = 0; w < rows.size(); w++) {
                Rat term(0);
                for (long long col = 0; col < out.K; col++) {
                    if (rows[w][col] == 0) continue;
                    uint64_t z = c.vertex(w);
                    if (!out.g[col].is_defined(z))
                        throw Error("extend_global: coefficient references an undefined value");
                    term += Rat(rows[w][col]) * out.g[col][z];
                }
                rhs = (popcount32(w) & 1) ? rhs - term : rhs + term;
            }
            if (!(lhs == rhs)) throw Error("extend_global: certified identity failed re-verification");
        }
        return out;
    }
    throw StochasticFailure("extend_global: retry budget exhausted (" + last_fail +
                            "); L=" + std::to_string(L));
}

namespace {

// outcome of the recursive extension claim at degree t
struct ClaimOut {
    CubeSystem system;          // degree t
    PolynomialHierarchy hier;   // degree t-1 on the system
    RealFn g_tilde;
    BCoeffs b;                  // (t+1)-derivatives condition witnesses
};

// degree-t cube system from a near-total point set X and top cube set Stop
CubeSystem system_from_sets(const FiniteGroupSpec& G, int t, const std::vector<uint8_t>& X,
                            const Bitset& Stop) {
    CubeSystem D(G, t);
    for (int k = 0; k <= t; k++) {
        auto idx = D.indexer(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            bool ok = true;
            for (uint32_t w = 0; w < (1u << k) && ok; w++)
                if (!X[c.vertex(w)]) ok = false;
            if (ok) D.levels[k].set(i);
        }
    }
    auto idxt = D.indexer(t + 1);
    for (uint64_t i = 0; i < idxt.size(); i++) {
        if (!Stop.get(i)) continue;
        CubeConfig c = idxt.cube(i);
        bool ok = true;
        for (uint32_t w = 0; w < (2u << t) && ok; w++)
            if (!X[c.vertex(w)]) ok = false;
        if (ok) D.levels[t + 1].set(i);
    }
    return D;
}

ClaimOut claim_recursion(const RealFn& g, const CubeSystem& T, int t, const Rat& eps_prime,
                         uint64_t seed) {
    const FiniteGroupSpec& G = *g.G;
    uint64_t n = G.order();
    RatOps ops;

    if (t == 0) {
        // a function with vanishing differences on a connected system is
        // constant on its domain; extend by that constant
        Rat value;
        bool have = false;
        for (uint64_t x = 0; x < n; x++) {
            if (!T.levels[0].get(x)) continue;
            if (!have) {
                value = g[x];
                have = true;
            } else if (!(g[x] == value)) {
                throw ContractError("claim base: function not constant on its component");
            }
        }
        if (!have) throw ContractError("claim base: empty domain");
        ClaimOut out;
        out.system = CubeSystem::full(G, 0, Rat(1));
        out.hier.G = &G;
        out.hier.s = -1;
        out.hier.M = Rat(1);
        out.hier.host = out.system;
        out.g_tilde = RealFn(G);
        for (uint64_t x = 0; x < n; x++) out.g_tilde.v[x] = value;
        out.b.k = 1;
        out.b.t = 0;
        auto idx1 = out.system.indexer(1);
        for (uint64_t i = 0; i < idx1.size(); i++)
            out.b.data.emplace(i, std::vector<std::vector<long long>>(2));
        return out;
    }

    Rat eps0 = eps_prime / Rat(4);
    ExtendGlobalResult ext = extend_global(g, T, eps0, seed);

    DensifyResult dens = densify(system_from_sets(G, t, ext.X, ext.S));
    CubeSystem Sprime = dens.system;

    // recurse on each difference function, component by component
    struct Piece {
        int col;
        ClaimOut out;
        CubeSystem upgraded;               // degree t
        std::vector<uint8_t> comp_points;  // T_0 of the component
    };
    std::vector<Piece> pieces;
    std::vector<std::vector<int>> piece_of_col(ext.g.size());  // column -> piece ids
    for (size_t col = 0; col < ext.g.size(); col++) {
        CubeSystem& gs = ext.g_systems[col];
        if (gs.levels[0].count() == 0) continue;
        Rat eps_split = Rat::pow(gs.delta, 4) / Rat(4);
        SplitResult sp = split(gs, eps_split);
        for (size_t j = 0; j < sp.component_systems.size(); j++) {
            Piece p;
            p.col = (int)col;
            RealFn grestrict = ext.g[col];
            grestrict.defined.assign(n, 0);
            for (uint64_t x : sp.components[j]) grestrict.defined[x] = 1;
            p.comp_points.assign(n, 0);
            for (uint64_t x : sp.components[j]) p.comp_points[x] = 1;
            p.out = claim_recursion(grestrict, sp.component_systems[j], t - 1, eps_prime,
                                    seed * 1315423911u + col * 2654435761u + j + 1);
            // upgrade the degree-(t-1) system to degree t
            CubeSystem up_in(G, t);
            for (int k = 0; k <= t; k++) up_in.levels[k] = p.out.system.levels[k];
            up_in.levels[t + 1] = Bitset(up_in.indexer(t + 1).size(), true);
            p.upgraded = densify(up_in).system;
            piece_of_col[col].push_back((int)pieces.size());
            pieces.push_back(std::move(p));
        }
    }

    // intersect all systems
    CubeSystem final_sys = Sprime;
    for (auto& p : pieces) final_sys = intersect(final_sys, p.upgraded);

    // assemble the combined hierarchy: levels 0..t-1
    ClaimOut out;
    out.hier.G = &G;
    out.hier.s = t - 1;
    out.hier.dims.assign(t, 0);
    out.hier.fns.assign(t, {});
    out.hier.b.assign(t, {});
    // position maps: for each piece, its own level-i slot -> combined slot;
    // and for each piece the combined slot of its g_tilde at level t-1
    std::vector<std::vector<std::vector<int>>> remap(pieces.size());
    std::vector<int> top_slot(pieces.size(), -1);
    for (size_t pi = 0; pi < pieces.size(); pi++) {
        auto& P = pieces[pi];
        remap[pi].assign(t, {});
        for (int lev = 0; lev <= P.out.hier.s; lev++) {
            for (int j = 0; j < P.out.hier.dims[lev]; j++) {
                remap[pi][lev].push_back(out.hier.dims[lev]);
                out.hier.fns[lev].push_back(P.out.hier.fns[lev][j]);
                out.hier.dims[lev]++;
            }
        }
        top_slot[pi] = out.hier.dims[t - 1];
        out.hier.fns[t - 1].push_back(P.out.g_tilde);
        out.hier.dims[t - 1]++;
    }

    // translate a piece-local BCoeffs into the combined index space
    auto translate_b = [&](size_t pi, const BCoeffs& src, int deg) {
        BCoeffs dst;
        dst.k = src.k;
        dst.t = deg;
        dst.dims.assign(out.hier.dims.begin(), out.hier.dims.begin() + deg);
        for (auto& [ci, rows] : src.data) {
            std::vector<std::vector<long long>> nrows(rows.size(),
                                                      std::vector<long long>(dst.width(), 0));
            for (uint32_t w = 0; w < rows.size(); w++) {
                for (int lev = 0; lev < deg && lev < (int)remap[pi].size(); lev++) {
                    int soff = src.offset(lev);
                    for (int j = 0; j < src.dims[lev]; j++) {
                        long long cf = rows[w][soff + j];
                        if (cf == 0) continue;
                        nrows[w][dst.offset(lev) + remap[pi][lev][j]] = cf;
                    }
                }
            }
            dst.data.emplace(ci, std::move(nrows));
        }
        return dst;
    };

    // member witnesses
    for (int lev = 0; lev < t; lev++) out.hier.b[lev].resize(out.hier.dims[lev]);
    for (size_t pi = 0; pi < pieces.size(); pi++) {
        auto& P = pieces[pi];
        for (int lev = 0; lev <= P.out.hier.s; lev++)
            for (int j = 0; j < P.out.hier.dims[lev]; j++)
                out.hier.b[lev][remap[pi][lev][j]] = translate_b(pi, P.out.hier.b[lev][j], lev);
        out.hier.b[t - 1][top_slot[pi]] = translate_b(pi, P.out.b, t - 1);
    }

    // rewrite the top condition b: column col at vertex v goes to the piece
    // whose component contains v, provided the extension agrees there
    uint64_t bad_marker = 0;
    Bitset good_top(final_sys.indexer(t + 1).size());
    BCoeffs newb;
    newb.k = t + 1;
    newb.t = t;
    newb.dims = out.hier.dims;
    auto idx_top = final_sys.indexer(t + 1);
    for (uint64_t ci = 0; ci < final_sys.levels[t + 1].size(); ci++) {
        if (!final_sys.levels[t + 1].get(ci)) continue;
        if (!ext.b.has(ci)) continue;
        CubeConfig c = idx_top.cube(ci);
        const auto& rows = ext.b.data.at(ci);
        std::vector<std::vector<long long>> nrows(rows.size(),
                                                  std::vector<long long>(newb.width(), 0));
        bool ok = true;
        for (uint32_t w = 0; w < rows.size() && ok; w++) {
            uint64_t v = c.vertex(w);
            for (size_t col = 0; col < ext.g.size() && ok; col++) {
                long long cf = rows[w][col];
                if (cf == 0) continue;
                int found = -1;
                for (int pid : piece_of_col[col]) {
                    if (!pieces[pid].comp_points[v]) continue;
                    if (!pieces[pid].out.g_tilde.is_defined(v)) continue;
                    // the extension must reproduce the difference value here
                    if (!(pieces[pid].out.g_tilde.v[v] == ext.g[col].v[v])) continue;
                    found = pid;
                    break;
                }
                if (found < 0) {
                    ok = false;
                    break;
                }
                nrows[w][newb.offset(t - 1) + top_slot[found]] += cf;
            }
        }
        if (ok) {
            good_top.set(ci);
            newb.data.emplace(ci, std::move(nrows));
        } else {
            bad_marker++;
        }
    }
    if (bad_marker > 0) {
        CubeSystem filtered = final_sys;
        filtered.levels[t + 1] = good_top;
        final_sys = patch(final_sys, filtered).system;
        for (uint64_t ci = 0; ci < final_sys.levels[t + 1].size(); ci++)
            if (final_sys.levels[t + 1].get(ci) && !newb.has(ci))
                final_sys.levels[t + 1].set(ci, false);
    } else {
        final_sys.delta = verify_system(final_sys).worst_popularity;
    }

    // members' witnesses must cover the intersected host; drop host cubes
    // without data (can only shrink within the recorded systems)
    out.hier.host = final_sys;
    out.hier.M = Rat(std::max(1LL, ext.M));
    for (int lev = 0; lev < t; lev++)
        for (int j = 0; j < out.hier.dims[lev]; j++)
            for (auto& [ci, rows] : out.hier.b[lev][j].data)
                for (auto& row : rows) {
                    long long nrm = 0;
                    for (long long cf : row) nrm += cf < 0 ? -cf : cf;
                    if (Rat(nrm) > out.hier.M) out.hier.M = Rat(nrm);
                }

    out.system = final_sys;
    out.g_tilde = ext.f_tilde;
    out.b = std::move(newb);
    return out;
}

}  // namespace

BuildHierarchyResult build_hierarchy(const RealFn& g, int s, const Rat& delta, const Rat& eps,
                                     uint64_t seed) {
    const FiniteGroupSpec& G = *g.G;
    uint64_t n = G.order();
    RatOps ops;

    // S_{s+1} = vanishing derivative cubes over the defined domain; lower
    // levels are the full cube sets over the domain
    CubeSystem base(G, s);
    for (int k = 0; k <= s; k++) {
        auto idx = base.indexer(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            bool ok = true;
            for (uint32_t w = 0; w < (1u << k) && ok; w++)
                if (!g.is_defined(c.vertex(w))) ok = false;
            if (ok) base.levels[k].set(i);
        }
    }
    auto idx_top = base.indexer(s + 1);
    for (uint64_t i = 0; i < idx_top.size(); i++) {
        CubeConfig c = idx_top.cube(i);
        bool ok = true;
        for (uint32_t w = 0; w < (2u << s) && ok; w++)
            if (!g.is_defined(c.vertex(w))) ok = false;
        if (ok && ops.eq(derivative(ops, g.v, c), ops.zero())) base.levels[s + 1].set(i);
    }
    Rat measured_eps = base.density(s + 1);
    if (measured_eps < delta)
        throw ContractError("build_hierarchy: measured vanishing fraction below the stated delta");

    CubeSystem pruned = prune(base, measured_eps);
    Rat eps_split = Rat::pow(pruned.delta, 4) / Rat(4);
    SplitResult sp = split(pruned, eps_split);
    // pass to the largest component
    size_t best = 0;
    for (size_t j = 1; j < sp.components.size(); j++)
        if (sp.components[j].size() > sp.components[best].size()) best = j;
    CubeSystem comp = sp.component_systems[best];

    RealFn grestrict = g;
    grestrict.defined.assign(n, 0);
    for (uint64_t x : sp.components[best]) grestrict.defined[x] = 1;

    ClaimOut res = claim_recursion(grestrict, comp, s, eps, seed);

    BuildHierarchyResult out;
    out.system = res.system;
    out.hierarchy = res.hier;
    out.g_tilde = res.g_tilde;
    out.b = std::move(res.b);
    out.Y.assign(n, 0);
    uint64_t ycount = 0;
    for (uint64_t x = 0; x < n; x++) {
        if (!res.system.levels[0].get(x)) continue;
        if (!grestrict.is_defined(x)) continue;
        if (!res.g_tilde.is_defined(x)) continue;
        if (res.g_tilde.v[x] == g.v[x]) {
            out.Y[x] = 1;
            ycount++;
        }
    }
    out.mu_Y = Rat((long long)ycount, (long long)n);
    out.D = 0;
    for (int d : out.hierarchy.dims) out.D += d;
    out.M = out.hierarchy.M;

    if (ycount == 0) throw Error("build_hierarchy: empty agreement set");
    DerivCheck chk = verify_deriv_condition(out.g_tilde, out.hierarchy, out.b,
                                            out.system.levels[s + 1], s + 1, s, out.M);
    if (!chk.holds) throw Error("build_hierarchy: top derivatives condition failed verification");
    if (!verify_hierarchy(out.hierarchy))
        throw Error("build_hierarchy: hierarchy member verification failed");
    return out;
}

}  // namespace hofa
