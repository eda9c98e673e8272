#include "hofa/cube_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hofa/util.hpp"

namespace hofa {

uint64_t Bitset::count() const {
    uint64_t c = 0;
    for (uint64_t w : w_) c += (uint64_t)std::popcount(w);
    return c;
}

CubeSystem::CubeSystem(const FiniteGroupSpec& g, int degree) : G(&g), s(degree) {
    levels.reserve(degree + 2);
    for (int k = 0; k <= degree + 1; k++) levels.emplace_back(indexer(k).size());
}

CubeSystem CubeSystem::full(const FiniteGroupSpec& g, int degree, const Rat& delta) {
    CubeSystem S(g, degree);
    for (int k = 0; k <= degree + 1; k++) S.levels[k] = Bitset(S.indexer(k).size(), true);
    S.delta = delta;
    return S;
}

namespace {

CubeConfig transpose_cube(const CubeConfig& c, int i, int j) {
    CubeConfig r = c;
    std::swap(r.h[i], r.h[j]);
    return r;
}

CubeConfig reflect_cube(const CubeConfig& c, int i) {
    CubeConfig r = c;
    r.x = c.G->add(c.x, c.h[i]);
    r.h[i] = c.G->neg(c.h[i]);
    return r;
}

// number of h with [c, c + box(h)] in the next level up
uint64_t popularity_count(const CubeSystem& S, int k, const CubeConfig& c) {
    auto idx = S.indexer(k + 1);
    uint64_t cnt = 0;
    for (uint64_t h = 0; h < S.G->order(); h++)
        if (S.levels[k + 1].get(idx.index(extend_cube(c, h)))) cnt++;
    return cnt;
}

// smallest t/2^B with (t/2^B)^m >= x, for x in [0, 1]
Rat nth_root_upper(const Rat& x, unsigned m, unsigned bits = 24) {
    if (x.sign() <= 0) return Rat(0);
    if (x >= Rat(1)) return x;
    BigInt two_b = BigInt::pow(BigInt(2), bits);
    // target = ceil(x * 2^{m*bits})
    BigInt scaled_num = x.num() * BigInt::pow(BigInt(2), (unsigned long long)m * bits);
    BigInt target = scaled_num / x.den();
    if (!((target * x.den()) == scaled_num)) target = target + BigInt(1);
    // integer m-th root, rounded up
    BigInt lo(0), hi = two_b;
    while (lo < hi) {
        BigInt mid = (lo + hi) / BigInt(2);
        if (BigInt::pow(mid, m) >= target)
            hi = mid;
        else
            lo = mid + BigInt(1);
    }
    return Rat(lo, two_b);
}

}  // namespace

VerifyReport verify_system(const CubeSystem& S, size_t max_violations) {
    VerifyReport rep;
    rep.symmetry_ok = rep.faces_ok = rep.popularity_ok = true;
    rep.worst_popularity = Rat(1);
    const FiniteGroupSpec& G = *S.G;
    bool any_checked = false;

    for (int k = 0; k <= S.s + 1; k++) {
        auto idx = S.indexer(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            if (!S.levels[k].get(i)) continue;
            CubeConfig c = idx.cube(i);
            if (k >= 1) {
                // symmetry generators: adjacent transpositions and one reflection
                for (int t = 0; t + 1 < k; t++)
                    if (!S.contains(k, transpose_cube(c, t, t + 1))) {
                        rep.symmetry_ok = false;
                        if (rep.violations.size() < max_violations)
                            rep.violations.push_back({0, k, i, "transposition leaves the set"});
                    }
                if (!S.contains(k, reflect_cube(c, 0))) {
                    rep.symmetry_ok = false;
                    if (rep.violations.size() < max_violations)
                        rep.violations.push_back({0, k, i, "reflection leaves the set"});
                }
                // codimension-1 faces
                for (int d = 1; d <= k; d++) {
                    if (!S.contains(k - 1, restrict_cube(c, Face::lower_codim1(d, k))) ||
                        !S.contains(k - 1, restrict_cube(c, Face::upper_codim1(d, k)))) {
                        rep.faces_ok = false;
                        if (rep.violations.size() < max_violations)
                            rep.violations.push_back({1, k, i, "face not in lower level"});
                    }
                }
            }
            if (k <= S.s) {
                any_checked = true;
                uint64_t cnt = popularity_count(S, k, c);
                Rat pop(BigInt((long long)cnt), BigInt((long long)G.order()));
                if (pop < rep.worst_popularity) rep.worst_popularity = pop;
                if (pop < S.delta) {
                    rep.popularity_ok = false;
                    if (rep.violations.size() < max_violations)
                        rep.violations.push_back({2, k, i, "unpopular cube"});
                }
            }
        }
    }
    (void)any_checked;
    rep.holds = rep.symmetry_ok && rep.faces_ok && rep.popularity_ok;
    return rep;
}

CubeSystem prune(const CubeSystem& input, const Rat& eps) {
    const FiniteGroupSpec& G = *input.G;
    int s = input.s;
    CubeSystem S = input;
    S.delta = Rat(1, BigInt::pow(BigInt(2), 2 * s + 4).to_i64()) * Rat(1, (s + 1) * (s + 1)) * eps;
    Rat threshold = S.delta * Rat((long long)G.order());

    bool changed = true;
    while (changed) {
        changed = false;
        for (int k = 0; k <= s; k++) {
            auto idx = S.indexer(k);
            // violators of the popularity condition at level k
            std::vector<uint64_t> removed_k;
            for (uint64_t i = 0; i < idx.size(); i++) {
                if (!S.levels[k].get(i)) continue;
                CubeConfig c = idx.cube(i);
                if (Rat((long long)popularity_count(S, k, c)) < threshold) removed_k.push_back(i);
            }
            if (removed_k.empty()) continue;
            changed = true;
            Bitset removed_mark(idx.size());
            for (uint64_t i : removed_k) {
                S.levels[k].set(i, false);
                removed_mark.set(i);
            }
            // (k+1)-cubes that restrict to a removed cube on a codim-1 face
            auto idx1 = S.indexer(k + 1);
            Bitset removed_up(idx1.size());
            for (uint64_t i = 0; i < idx1.size(); i++) {
                if (!S.levels[k + 1].get(i)) continue;
                CubeConfig c = idx1.cube(i);
                bool hit = false;
                for (int d = 1; d <= k + 1 && !hit; d++) {
                    if (removed_mark.get(idx.index(restrict_cube(c, Face::lower_codim1(d, k + 1)))) ||
                        removed_mark.get(idx.index(restrict_cube(c, Face::upper_codim1(d, k + 1)))))
                        hit = true;
                }
                if (hit) {
                    S.levels[k + 1].set(i, false);
                    removed_up.set(i);
                }
            }
            // higher cubes having any removed (k+1)-cube as a face
            for (int l = k + 2; l <= s + 1; l++) {
                auto idxl = S.indexer(l);
                auto faces = faces_of_dim(l, k + 1);
                for (uint64_t i = 0; i < idxl.size(); i++) {
                    if (!S.levels[l].get(i)) continue;
                    CubeConfig c = idxl.cube(i);
                    for (const Face& F : faces) {
                        if (removed_up.get(idx1.index(restrict_cube(c, F)))) {
                            S.levels[l].set(i, false);
                            break;
                        }
                    }
                }
            }
        }
    }
    if (S.levels[s + 1].count() == 0)
        throw Error("prune: output empty; inputs violated the stated preconditions");
    return S;
}

DensifyResult densify(const CubeSystem& input, bool strict) {
    const FiniteGroupSpec& G = *input.G;
    int s = input.s;
    uint64_t n = G.order();

    Rat eps(0);
    for (int k = 0; k <= s + 1; k++) {
        Rat miss = Rat(1) - input.density(k);
        if (miss > eps) eps = miss;
    }
    long long fact = 1;
    for (int i = 2; i <= s + 1; i++) fact *= i;
    Rat eps0 = Rat(BigInt::pow(BigInt(2), s + 1)) * Rat(fact) * eps;
    Rat eps1 = Rat(BigInt::pow(BigInt(4), s + 1)) * eps0;
    Rat eta = Rat(2) * nth_root_upper(eps1, 2 * (unsigned)(s + 1));
    Rat delta = Rat(BigInt::pow(BigInt(4), s + 1)) * eta;
    bool certified = delta < Rat(1);
    if (strict && !certified) throw ParameterTooWeakError("densify: derived delta >= 1");
    Rat eta_n = eta * Rat((long long)n);

    // stage 0: symmetrize
    CubeSystem S0(G, s);
    for (int k = 0; k <= s + 1; k++) {
        auto idx = S0.indexer(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            if (!input.levels[k].get(i)) continue;
            CubeConfig c = idx.cube(i);
            // walk the orbit under transpositions and reflections
            std::vector<uint64_t> stack = {i};
            Bitset seen(idx.size());
            seen.set(i);
            bool ok = true;
            while (!stack.empty() && ok) {
                CubeConfig cur = idx.cube(stack.back());
                stack.pop_back();
                auto push = [&](const CubeConfig& nc) {
                    uint64_t j = idx.index(nc);
                    if (!input.levels[k].get(j)) ok = false;
                    if (!seen.get(j)) {
                        seen.set(j);
                        stack.push_back(j);
                    }
                };
                for (int t = 0; t + 1 < k && ok; t++) push(transpose_cube(cur, t, t + 1));
                if (k >= 1 && ok) push(reflect_cube(cur, 0));
            }
            if (ok) S0.levels[k].set(i);
        }
    }

    // stage 1: hereditary face closure
    CubeSystem S1(G, s);
    for (int k = 0; k <= s + 1; k++) {
        auto idx = S1.indexer(k);
        auto faces = all_faces(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            bool ok = true;
            for (const Face& F : faces) {
                if (!S0.levels[F.dim()].get(S0.indexer(F.dim()).index(restrict_cube(c, F)))) {
                    ok = false;
                    break;
                }
            }
            if (ok) S1.levels[k].set(i);
        }
    }

    // stage 2: downward T/U pruning against the eta threshold.  The proof
    // gives S2 subset of S1 only when eta < 1; intersecting keeps the
    // output inside the input in the uncertified regime too.
    CubeSystem S2(G, s);
    S2.levels[s + 1] = S1.levels[s + 1];
    for (int k = s; k >= 0; k--) {
        auto idx = S2.indexer(k);
        auto idx1 = S2.indexer(k + 1);
        Bitset T(idx.size());
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            uint64_t bad = 0;
            for (uint64_t h = 0; h < n; h++)
                if (!S2.levels[k + 1].get(idx1.index(extend_cube(c, h)))) bad++;
            if (bad > 0 && Rat((long long)bad) >= eta_n) T.set(i);
        }
        for (uint64_t i = 0; i < idx.size(); i++) {
            if (!S1.levels[k].get(i)) continue;
            CubeConfig c = idx.cube(i);
            if (T.get(i)) continue;
            uint64_t bad = 0;
            for (uint64_t h = 0; h < n; h++) {
                CubeConfig shifted = c;
                shifted.x = G.add(c.x, h);
                if (T.get(idx.index(shifted))) bad++;
            }
            if (bad > 0 && Rat((long long)bad) >= eta_n) continue;  // in U_k
            S2.levels[k].set(i);
        }
    }

    // stage 3: face closure again
    DensifyResult out;
    out.system = CubeSystem(G, s);
    for (int k = 0; k <= s + 1; k++) {
        auto idx = out.system.indexer(k);
        auto faces = all_faces(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            bool ok = true;
            for (const Face& F : faces) {
                if (!S2.levels[F.dim()].get(S2.indexer(F.dim()).index(restrict_cube(c, F)))) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.system.levels[k].set(i);
        }
    }
    out.eps = eps;
    out.eta = eta;
    out.delta = delta;
    out.certified = certified;
    if (out.system.levels[0].count() == 0)
        throw ParameterTooWeakError("densify: output empty; parameter chain too weak for these inputs");
    if (certified) {
        out.system.delta = Rat(1) - delta;
    } else {
        out.system.delta = Rat(0);
        out.system.delta = verify_system(out.system).worst_popularity;
    }
    return out;
}

CubeSystem intersect(const CubeSystem& A, const CubeSystem& B) {
    CubeSystem S(*A.G, A.s);
    for (int k = 0; k <= A.s + 1; k++) {
        for (uint64_t i = 0; i < A.levels[k].size(); i++)
            if (A.levels[k].get(i) && B.levels[k].get(i)) S.levels[k].set(i);
    }
    S.delta = A.delta + B.delta - Rat(1);
    if (S.delta.sign() < 0) S.delta = Rat(0);
    return S;
}

PatchResult patch(const CubeSystem& S, const CubeSystem& S_prime, bool strict) {
    const FiniteGroupSpec& G = *S.G;
    int s = S.s;
    // complement of S \ S'
    CubeSystem T(G, s);
    for (int k = 0; k <= s + 1; k++) {
        for (uint64_t i = 0; i < T.levels[k].size(); i++) {
            bool lost = S.levels[k].get(i) && !S_prime.levels[k].get(i);
            T.levels[k].set(i, !lost);
        }
    }
    DensifyResult dens = densify(T, strict);

    PatchResult out;
    out.claimed_parameter = S.delta - dens.delta;
    out.certified = dens.certified && out.claimed_parameter.sign() > 0;
    if (strict && !out.certified) throw ParameterTooWeakError("patch: claimed parameter non-positive");
    out.system = intersect(S, dens.system);
    out.eta = dens.delta;
    out.system.delta = Rat(0);
    VerifyReport rep = verify_system(out.system);
    out.measured_parameter = rep.worst_popularity;
    out.system.delta = rep.worst_popularity;
    if (out.system.levels[0].count() == 0) throw ParameterTooWeakError("patch: empty output");
    return out;
}

std::vector<int> Graph::components() const {
    std::vector<int> comp(n, -1);
    int cid = 0;
    for (int v = 0; v < n; v++) {
        if (comp[v] >= 0) continue;
        std::vector<int> stack = {v};
        comp[v] = cid;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = cid;
                    stack.push_back(w);
                }
        }
        cid++;
    }
    return comp;
}

CheegerResult cheeger(const Graph& g, int exact_limit) {
    CheegerResult res;
    if (g.n == 0) throw ArgumentError("cheeger: empty graph");
    if (g.n == 1) {
        res.infinite = true;
        return res;
    }
    if (g.n <= exact_limit) {
        std::vector<uint32_t> adjmask(g.n, 0);
        for (int v = 0; v < g.n; v++)
            for (int w : g.adj[v]) adjmask[v] |= (1u << w);
        uint64_t best_cut = ~0ULL;
        int best_size = 1;
        uint32_t best_mask = 0;
        for (uint32_t m = 1; m < (1u << g.n); m++) {
            int size = std::popcount(m);
            if (2 * size > g.n) continue;
            uint64_t cut = 0;
            for (int v = 0; v < g.n; v++)
                if (m & (1u << v)) cut += (uint64_t)std::popcount(adjmask[v] & ~m);
            // compare cut/size < best_cut/best_size
            if (best_cut == ~0ULL || cut * (uint64_t)best_size < best_cut * (uint64_t)size) {
                best_cut = cut;
                best_size = size;
                best_mask = m;
            }
        }
        res.H = Rat((long long)best_cut, best_size);
        res.h = res.H / Rat(g.n);
        for (int v = 0; v < g.n; v++)
            if (best_mask & (1u << v)) res.witness.push_back(v);
        return res;
    }
    // degree-ordered sweep upper bound
    res.exact = false;
    std::vector<int> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return g.adj[a].size() < g.adj[b].size(); });
    std::vector<uint8_t> in(g.n, 0);
    long long cut = 0;
    bool found = false;
    Rat best;
    for (int i = 0; i < g.n / 2; i++) {
        int v = order[i];
        for (int w : g.adj[v]) cut += in[w] ? -1 : 1;
        in[v] = 1;
        Rat ratio(cut, i + 1);
        if (!found || ratio < best) {
            best = ratio;
            found = true;
        }
    }
    res.H = best;
    res.h = best / Rat(g.n);
    return res;
}

Graph component_graph(const CubeSystem& S) {
    const FiniteGroupSpec& G = *S.G;
    std::vector<uint64_t> verts;
    std::vector<int> of_elem(G.order(), -1);
    for (uint64_t x = 0; x < G.order(); x++)
        if (S.levels[0].get(x)) {
            of_elem[x] = (int)verts.size();
            verts.push_back(x);
        }
    Graph g((int)verts.size());
    g.label = verts;
    auto idx1 = S.indexer(1);
    for (size_t a = 0; a < verts.size(); a++) {
        for (size_t b = a + 1; b < verts.size(); b++) {
            CubeConfig c(G, verts[a], {G.sub(verts[b], verts[a])});
            if (S.levels[1].get(idx1.index(c))) g.add_edge((int)a, (int)b);
        }
    }
    return g;
}

SplitResult split(const CubeSystem& S, const Rat& eps, int C) {
    const FiniteGroupSpec& G = *S.G;
    // eps <= delta^C / C
    Rat lim = Rat::pow(S.delta, (unsigned)C) / Rat(C);
    if (eps > lim) throw ArgumentError("split: eps exceeds delta^C / C");

    SplitResult out;
    out.system = S;
    Rat eps_n = eps * Rat((long long)G.order());
    const int max_iter = 4 * (int)G.order();
    for (int iter = 0;; iter++) {
        if (iter > max_iter) throw Error("split: cut iteration failed to terminate");
        Graph g = component_graph(out.system);
        if (g.n == 0) throw Error("split: empty vertex set");
        auto comp = g.components();
        int K = 1 + *std::max_element(comp.begin(), comp.end());
        // locate a component whose Cheeger constant is below eps |H|
        int bad_comp = -1;
        std::vector<int> witness;
        for (int ci = 0; ci < K && bad_comp < 0; ci++) {
            std::vector<int> vs;
            for (int v = 0; v < g.n; v++)
                if (comp[v] == ci) vs.push_back(v);
            Graph sub((int)vs.size());
            std::vector<int> back(g.n, -1);
            for (size_t i = 0; i < vs.size(); i++) back[vs[i]] = (int)i;
            for (int v : vs)
                for (int w : g.adj[v])
                    if (back[w] > back[v]) sub.add_edge(back[v], back[w]);
            CheegerResult ch = cheeger(sub);
            if (!ch.exact) throw ArgumentError("split: component too large for an exact certificate");
            if (!ch.infinite && ch.H < eps_n) {
                bad_comp = ci;
                witness.reserve(ch.witness.size());
                for (int w : ch.witness) witness.push_back(vs[w]);
            }
        }
        if (bad_comp < 0) {
            out.iterations = iter;
            // collect components and their subsystems
            out.components.assign(K, {});
            for (int v = 0; v < g.n; v++) out.components[comp[v]].push_back(g.label[v]);
            VerifyReport rep = verify_system(out.system);
            out.delta_prime = rep.worst_popularity;
            out.system.delta = rep.worst_popularity;
            // K <= 1 / delta'
            if (Rat(K) * out.delta_prime > Rat(1)) throw Error("split: component bound K <= 1/delta' failed");
            for (int ci = 0; ci < K; ci++) {
                std::vector<uint8_t> in_comp(G.order(), 0);
                for (uint64_t x : out.components[ci]) in_comp[x] = 1;
                CubeSystem sys(G, S.s);
                sys.delta = out.delta_prime;
                for (int k = 0; k <= S.s + 1; k++) {
                    auto idx = sys.indexer(k);
                    for (uint64_t i = 0; i < idx.size(); i++) {
                        if (!out.system.levels[k].get(i)) continue;
                        CubeConfig c = idx.cube(i);
                        bool ok = true;
                        for (uint32_t w = 0; (w < (1u << k)) && ok; w++)
                            if (!in_comp[c.vertex(w)]) ok = false;
                        if (ok) sys.levels[k].set(i);
                    }
                }
                out.component_systems.push_back(std::move(sys));
            }
            return out;
        }
        // remove the S_1 edges across the witness cut, then patch
        std::vector<uint8_t> inA(G.order(), 0), inComp(G.order(), 0);
        for (int v : witness) inA[g.label[v]] = 1;
        for (int v = 0; v < g.n; v++)
            if (comp[v] == bad_comp) inComp[g.label[v]] = 1;
        CubeSystem pruned = out.system;
        auto idx1 = pruned.indexer(1);
        for (uint64_t i = 0; i < idx1.size(); i++) {
            if (!pruned.levels[1].get(i)) continue;
            CubeConfig c = idx1.cube(i);
            uint64_t x = c.vertex(0), y = c.vertex(1);
            if (x == y) continue;
            bool cross = inComp[x] && inComp[y] && (inA[x] != inA[y]);
            if (cross) pruned.levels[1].set(i, false);
        }
        PatchResult p = patch(out.system, pruned);
        out.system = p.system;
        // A genuine system has parameter > 0; the measured-parameter patch
        // can leave cubes with no extensions at all, so delete those (this
        // is the greedy deletion lemma with threshold below 1/|H|).
        if (verify_system(out.system).worst_popularity.is_zero()) {
            Rat eps_clean =
                Rat(BigInt::pow(BigInt(2), 2 * S.s + 4)) * Rat((S.s + 1) * (S.s + 1)) / Rat(2 * (long long)G.order());
            out.system = prune(out.system, eps_clean);
            out.system.delta = verify_system(out.system).worst_popularity;
        }
    }
}

McConnectivity mc_connectivity(const Graph& g, int k, long long trials, uint64_t seed) {
    if (trials < 1) throw ArgumentError("mc_connectivity: trials >= 1 required");
    CheegerResult ch = cheeger(g);
    double h = ch.infinite ? 1.0 : ch.h.to_double();

    Rng rng(seed);
    long long connected = 0;
    std::vector<int> sample(k), parent(k);
    for (long long t = 0; t < trials; t++) {
        for (int i = 0; i < k; i++) sample[i] = (int)rng.below((uint64_t)g.n);
        for (int i = 0; i < k; i++) parent[i] = i;
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (int i = 0; i < k; i++) {
            for (int j = i + 1; j < k; j++) {
                bool edge = false;
                for (int w : g.adj[sample[i]])
                    if (w == sample[j]) {
                        edge = true;
                        break;
                    }
                if (edge) parent[find(i)] = find(j);
            }
        }
        bool conn = true;
        for (int i = 1; i < k && conn; i++)
            if (find(i) != find(0)) conn = false;
        if (conn) connected++;
    }

    McConnectivity out;
    out.trials = trials;
    out.empirical = (double)connected / (double)trials;
    if (h <= 0) {
        out.bound = 1.0 - (double)(k + 1);
    } else {
        double expo = -(double)(k - 1) * std::pow(h, 4.0) / (64.0 * std::log(2.0 / (h * h)));
        out.bound = 1.0 - (double)(k + 1) * std::exp(expo);
    }
    out.bound_vacuous = out.bound <= 0;
    double p = std::min(std::max(out.bound, 0.0), 1.0);
    out.sigma = std::sqrt(p * (1.0 - p) / (double)trials);
    return out;
}

}  // namespace hofa
