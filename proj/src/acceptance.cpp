#include "hofa/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "hofa/approx_poly.hpp"
#include "hofa/cocycle.hpp"
#include "hofa/cs.hpp"
#include "hofa/cube_system.hpp"
#include "hofa/gowers.hpp"
#include "hofa/nil.hpp"
#include "hofa/util.hpp"

namespace hofa::acceptance {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

CplxFn quadratic_phase(const FiniteGroupSpec& G) {
    CplxFn f(G);
    for (uint64_t x = 0; x < G.order(); x++) {
        double t = kTau * (double)((x * x) % G.order()) / (double)G.order();
        f[x] = Cplx(std::cos(t), std::sin(t));
    }
    return f;
}

CplxFn random_one_bounded(const FiniteGroupSpec& G, Rng& rng) {
    CplxFn f(G);
    for (uint64_t x = 0; x < G.order(); x++) {
        double t = kTau * rng.unit();
        double r = rng.unit();
        f[x] = Cplx(r * std::cos(t), r * std::sin(t));
    }
    return f;
}

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.tellp() > 0 ? "; " : "") << what;
        }
    }
};

// 1. spectral identity for random one-bounded functions
void crit_spectral_identity(Check& c) {
    double worst = 0;
    for (long long N : {5, 7}) {
        FiniteGroupSpec G(N, 1, 1);
        Rng rng(1000 + (uint64_t)N);
        for (int s : {1, 2}) {
            for (int it = 0; it < 50; it++) {
                CplxFn f = random_one_bounded(G, rng);
                auto facts = sigma_facts(f, s);
                worst = std::max(worst, std::abs(facts.identity_lhs - facts.identity_rhs));
            }
        }
    }
    c.detail << "max identity gap " << worst;
    c.expect(worst <= 1e-9, "identity gap above 1e-9");
}

// 2. quadratic phase pipeline on Z/5
void crit_quadratic_pipeline(Check& c) {
    FiniteGroupSpec G(5, 1, 1);
    CplxFn f = quadratic_phase(G);
    double u3 = gowers_norm(f, 3);
    c.expect(std::abs(u3 - 1.0) <= 1e-9, "U^3 norm not 1");
    auto box = s_box(f, 2);
    for (uint64_t h1 = 0; h1 < 5 && c.ok; h1++)
        for (uint64_t h2 = 0; h2 < 5; h2++) {
            double t = kTau * (double)((2 * h1 * h2) % 5) / 5.0;
            if (std::abs(box.at({h1, h2}) - Cplx(std::cos(t), std::sin(t))) > 1e-9) {
                c.expect(false, "box average misses e(2h1h2/5)");
                break;
            }
        }
    auto sig = sigma_box(f, 2);
    for (uint64_t h1 = 0; h1 < 5 && c.ok; h1++)
        for (uint64_t chi = 0; chi < 5; chi++) {
            double want = chi == (2 * h1) % 5 ? 1.0 : 0.0;
            if (std::abs(sig.at(h1, chi) - want) > 1e-9) {
                c.expect(false, "spectral mass off the doubling graph");
                break;
            }
        }
    auto tg = threshold_graph(sig, 0.5);
    TorusFn kappa(G);
    bool full = true;
    for (uint64_t h1 = 0; h1 < 5; h1++) {
        if (!tg.in_domain[h1]) full = false;
        kappa.set(h1, Rat((long long)tg.frequency[h1], 5));
    }
    c.expect(full, "threshold domain not everything");
    TorusOps tops;
    auto rep = ap_parameter(tops, kappa, 1);
    c.expect(rep.eps == Rat(1), "threshold graph not exactly polynomial");
    c.detail << "U3=" << u3 << ", kappa eps=" << rep.eps.to_string();
}

// 3. fractional part of x/101 at degree 1
void crit_bracket_parameter(Check& c) {
    FiniteGroupSpec G(101, 1, 1);
    RealFn f(G);
    for (uint64_t x = 0; x < 101; x++) f[x] = Rat((long long)x, 101);
    auto rep = ap_parameter(RatOps{}, f, 1);
    c.detail << "eps = " << rep.eps.to_string();
    c.expect(rep.eps >= Rat(1, 10), "parameter below 1/10");
    c.expect(rep.well_defined == rep.total, "masked cubes appeared unexpectedly");
}

// 4. cocycle calculus: Z vanishes, averaging inverts, lossy recovery
void crit_cocycle_calculus(Check& c) {
    Rng rng(4242);
    for (long long N : {3, 5}) {
        FiniteGroupSpec G(N, 1, 1);
        for (int k = 1; k <= 3; k++) {
            OperatorSuite ops{&G, k};
            int runs = N == 3 ? 30 : 20;
            for (int it = 0; it < runs && c.ok; it++) {
                OperatorSuite::Table v(ops.vsize());
                for (auto& e : v) e = rng.rat_in_unit() - rng.rat_in_unit();
                for (auto& z : ops.Z(v))
                    if (!z.is_zero()) c.expect(false, "Z not identically zero");
            }
        }
    }
    // averaging inverts derivatives of full-domain defect-free data
    {
        FiniteGroupSpec G(5, 1, 1);
        for (int k : {1, 2}) {
            CubeIndexer idx{&G, k};
            CocycleData rho(G, k, 1);
            std::vector<std::vector<Rat>> l0(5, std::vector<Rat>(1));
            for (auto& r : l0) r[0] = rng.rat_in_unit() - rng.rat_in_unit();
            RatOps rops;
            for (uint64_t ci = 0; ci < idx.size(); ci++) {
                rho.domain.set(ci);
                CubeConfig cc = idx.cube(ci);
                Rat acc(0);
                for (uint32_t w = 0; w < (1u << k); w++) {
                    uint64_t x = cc.vertex(w);
                    acc = (popcount32(w) & 1) ? acc - l0[x][0] : acc + l0[x][0];
                }
                rho.values[ci][0] = acc;
            }
            auto lambda = avg_integrate(rho);
            for (uint64_t ci = 0; ci < idx.size() && c.ok; ci++) {
                CubeConfig cc = idx.cube(ci);
                Rat acc(0);
                for (uint32_t w = 0; w < (1u << k); w++) {
                    uint64_t x = cc.vertex(w);
                    acc = (popcount32(w) & 1) ? acc - lambda[x][0] : acc + lambda[x][0];
                }
                if (!(acc == rho.values[ci][0])) c.expect(false, "averaging failed to invert");
            }
            (void)rops;
        }
    }
    // lossy recovery of a corrupted coboundary on Z/11
    {
        FiniteGroupSpec G(11, 1, 1);
        CubeIndexer idx{&G, 2};
        CocycleData rho(G, 2, 1);
        std::vector<std::vector<Rat>> l0(11, std::vector<Rat>(1));
        for (auto& r : l0) r[0] = Rat(rng.range(-4, 4));
        for (uint64_t ci = 0; ci < idx.size(); ci++) {
            rho.domain.set(ci);
            CubeConfig cc = idx.cube(ci);
            Rat acc(0);
            for (uint32_t w = 0; w < 4; w++) {
                uint64_t x = cc.vertex(w);
                acc = (popcount32(w) & 1) ? acc - l0[x][0] : acc + l0[x][0];
            }
            rho.values[ci][0] = acc;
        }
        for (uint64_t i = 0; i < idx.size() / 100; i++)
            rho.values[rng.below(idx.size())][0] += Rat(1 + (long long)rng.below(3));
        auto res = integrate_lossy(rho, Rat(1, 1000000000000LL));
        uint64_t exact = 0;
        for (uint64_t ci = 0; ci < idx.size(); ci++) {
            if (!res.certified.get(ci)) continue;
            CubeConfig cc = idx.cube(ci);
            Rat acc(0);
            for (uint32_t w = 0; w < 4; w++) {
                uint64_t x = cc.vertex(w);
                acc = (popcount32(w) & 1) ? acc - res.lambda[x][0] : acc + res.lambda[x][0];
            }
            if (acc == rho.values[ci][0]) exact++;
        }
        c.detail << "certified " << res.certified.count() << "/" << idx.size() << ", exact "
                 << exact;
        c.expect(Rat((long long)exact) >= Rat(95, 100) * Rat((long long)res.certified.count()),
                 "derivative matches on under 95% of the certified set");
        c.expect(res.certified.count() > 0, "empty certified set");
    }
}

// 5. majority extension repairs every corrupted quadratic on Z/7
void crit_majority_extension(Check& c) {
    FiniteGroupSpec G(7, 1, 1);
    ZModOps z7{7};
    struct Fn {
        const FiniteGroupSpec* G;
        std::vector<long long> v;
        bool is_defined(uint64_t) const { return true; }
    };
    CubeIndexer idx3{&G, 3};
    long long instances = 0;
    for (int a2 = 0; a2 < 7 && c.ok; a2++)
        for (int a1 = 0; a1 < 7 && c.ok; a1++)
            for (int a0 = 0; a0 < 7 && c.ok; a0++) {
                std::vector<long long> truth(7);
                for (int x = 0; x < 7; x++) truth[x] = (a2 * x * x + a1 * x + a0) % 7;
                // every corruption position and offset
                for (int pos = 0; pos < 7 && c.ok; pos++)
                    for (int off = 1; off < 7 && c.ok; off++) {
                        Fn fn{&G, truth};
                        fn.v[pos] = (truth[pos] + off) % 7;
                        auto res = majority_extend(z7, fn, 2);
                        instances++;
                        if (res.extended != truth)
                            c.expect(false, "extension differs from the polynomial");
                    }
            }
    // exhaustive derivative check on a sample of repaired extensions
    std::vector<long long> truth(7);
    for (int x = 0; x < 7; x++) truth[x] = (3 * x * x + 2 * x + 5) % 7;
    Fn fn{&G, truth};
    fn.v[4] = (truth[4] + 3) % 7;
    auto res = majority_extend(z7, fn, 2);
    for (uint64_t ci = 0; ci < idx3.size() && c.ok; ci++)
        if (!z7.eq(derivative(z7, res.extended, idx3.cube(ci)), 0))
            c.expect(false, "third derivative does not vanish");
    c.detail << instances << " corrupted polynomials repaired";
}

// 6. cube system pipeline
void crit_cube_systems(Check& c) {
    FiniteGroupSpec G5(5, 1, 1);
    for (int s : {1, 2}) {
        CubeSystem in = CubeSystem::full(G5, s);
        CubeSystem out = prune(in, Rat(1));
        Rat want = Rat(1, BigInt::pow(BigInt(2), 2 * s + 4).to_i64()) * Rat(1, (s + 1) * (s + 1));
        c.expect(out.delta == want, "pruned delta differs from the stated constant");
        for (int k = 0; k <= s + 1; k++)
            c.expect(out.levels[k].count() == in.levels[k].count(), "prune deleted from full sets");
        c.expect(verify_system(out).holds, "pruned full system fails verification");
    }
    {
        FiniteGroupSpec G7(7, 1, 1);
        CubeSystem in = CubeSystem::full(G7, 1);
        in.levels[2].set(in.indexer(2).index(CubeConfig(G7, 3, {1, 5})), false);
        auto res = densify(in);
        c.expect(verify_system(res.system).holds, "densify output fails verification");
    }
    {
        FiniteGroupSpec G11(11, 1, 1);
        CubeSystem S = CubeSystem::full(G11, 1, Rat(1));
        CubeSystem Sp = S;
        Sp.levels[0].set(4, false);
        auto res = patch(S, Sp);
        c.expect(verify_system(res.system).holds, "patch output fails verification");
    }
    {
        FiniteGroupSpec G13(13, 1, 1);
        std::vector<uint8_t> blockA(13, 0);
        for (int x = 0; x <= 5; x++) blockA[x] = 1;
        CubeSystem S(G13, 1);
        for (int k = 0; k <= 2; k++) {
            auto idx = S.indexer(k);
            for (uint64_t i = 0; i < idx.size(); i++) {
                CubeConfig cc = idx.cube(i);
                bool allA = true, allB = true;
                for (uint32_t w = 0; w < (1u << k); w++)
                    (blockA[cc.vertex(w)] ? allB : allA) = false;
                if (allA || allB) S.levels[k].set(i);
            }
        }
        S.delta = verify_system(S).worst_popularity;
        auto res = split(S, Rat::pow(S.delta, 4) / Rat(4));
        c.expect(res.components.size() == 2, "two-block instance did not split into 2");
        c.expect(verify_system(res.system).holds, "split output fails verification");
        c.expect(Rat((long long)res.components.size()) <= Rat(1) / res.delta_prime,
                 "component bound K <= 1/delta' failed");
        c.detail << "split K=" << res.components.size()
                 << ", delta'=" << res.delta_prime.to_string();
    }
}

// 7. induced-subgraph connectivity Monte Carlo
void crit_mc_connectivity(Check& c) {
    Graph g(20);
    for (int a = 0; a < 20; a++)
        for (int b = a + 1; b < 20; b++)
            if (!(b == a + 1 && a % 2 == 0)) g.add_edge(a, b);
    auto res = mc_connectivity(g, 12, 10000, 777);
    c.detail << "empirical " << res.empirical << ", bound " << res.bound
             << (res.bound_vacuous ? " (vacuous)" : "");
    c.expect(res.empirical >= res.bound - 3 * res.sigma, "empirical below bound - 3 sigma");
}

// 8. discrete Cauchy-Schwarz and the counting lemma
void crit_cs_inequalities(Check& c) {
    Rng rng(808);
    for (int it = 0; it < 500 && c.ok; it++) {
        int n = 18, ys = 1 + (int)rng.below(6);
        std::vector<int> pi(n);
        std::vector<long long> f(n), g(ys);
        for (auto& p : pi) p = (int)rng.below((uint64_t)ys);
        for (auto& v : f) v = (long long)rng.below(4);
        for (auto& v : g) v = (long long)rng.below(4);
        if (!discrete_cs_counts(pi, f, g, ys).inequality_holds)
            c.expect(false, "discrete surrogate inequality failed");
    }
    FiniteGroupSpec H(5, 1, 1);
    LinearFormSystem sys;
    sys.d = 2;
    sys.forms = {{1, 0}, {1, 1}, {1, 2}};
    sys.j = 1;
    sys.sigma_sets = {{0}, {2}};
    sys.sigma = {{0, 1}, {2, -1}};
    sys.Q = 2;
    for (int it = 0; it < 100 && c.ok; it++) {
        std::vector<std::vector<Rat>> fns(3, std::vector<Rat>(5));
        for (auto& f : fns)
            for (auto& v : f) v = Rat(rng.range(0, 2));
        if (!gvn_counts(sys, fns, H).inequality_holds)
            c.expect(false, "counting inequality failed");
    }
    c.detail << "500 + 100 instances";
}

// 9. nil engine
void crit_nil_engine(Check& c) {
    Presentation G = builtin_heisenberg();
    Rng rng(909);
    G.validate(rng, 300);
    c.expect(G.commutator(G.generator(1, 0), G.generator(1, 1)) == Elt{Rat(0), Rat(0), Rat(1)},
             "generator commutator is not the central generator");
    c.expect(G.complexity() == Rat(1), "complexity is not 1");
    // matrix-model spot checks
    c.expect(G.multiply({Rat(0), Rat(1), Rat(0)}, {Rat(1), Rat(0), Rat(0)}) ==
                 Elt{Rat(1), Rat(1), Rat(-1)},
             "product disagrees with the matrix model");
    for (int it = 0; it < 1000 && c.ok; it++) {
        Elt g(3);
        for (auto& v : g) v = Rat(rng.range(-8, 8), rng.range(1, 6));
        auto [h, gamma] = G.reduce_fundamental(g);
        if (!(G.multiply(h, gamma) == g)) c.expect(false, "fundamental reduction round trip");
    }
    int trips = 0;
    for (int k = 1; k <= 3 && c.ok; k++) {
        for (int it = 0; it < 67 && c.ok; it++) {
            std::vector<std::map<uint32_t, std::vector<Rat>>> exps(G.degree());
            for (int lev = 1; lev <= 2; lev++)
                for (uint32_t eta = 0; eta < (1u << k); eta++) {
                    if (popcount32(eta) > lev) continue;
                    std::vector<Rat> vals(G.dims()[lev - 1]);
                    bool nz = false;
                    for (auto& v : vals) {
                        v = Rat(rng.range(-5, 5), rng.range(1, 3));
                        if (!v.is_zero()) nz = true;
                    }
                    if (nz) exps[lev - 1][eta] = vals;
                }
            auto cube = hk_compose(G, exps, k);
            auto dec = hk_decompose(G, cube);
            if (!dec.is_cube || !(dec.exponents == exps))
                c.expect(false, "cube decomposition round trip failed");
            trips++;
        }
    }
    FiniteGroupSpec H(13, 1, 1);
    Presentation P = bracket_presentation();
    NilPoly np = builtin_bracket(H, 1, 2, P);
    try {
        auto res = nil_to_hierarchy(np);  // verifies every condition on C^3
        c.detail << trips << " cube round trips, hierarchy dims";
        for (int d : res.hierarchy.dims) c.detail << ' ' << d;
    } catch (const std::exception& e) {
        c.expect(false, std::string("hierarchy extraction: ") + e.what());
    }
}

// 10. multilinear sampling on Z/5
void crit_multilin_sampling(Check& c) {
    FiniteGroupSpec G(5, 1, 1);
    CplxFn f = quadratic_phase(G);
    auto res = multilin_sample(f, s_box(f, 2), 2, 10);
    c.expect(res.score >= 1.0 - 1e-9, "quadratic phase score below 1");
    Rng rng(1010);
    double worst_margin = 1e300;
    for (int it = 0; it < 20; it++) {
        CplxFn g = random_one_bounded(G, rng);
        auto r = multilin_sample(g, s_box(g, 2), 2, 2020 + it);
        worst_margin = std::min(worst_margin, r.score - (r.bound - 1e-9));
        if (r.score < r.bound - 1e-9) {
            c.expect(false, "score below eta^2 - 1e-9");
            break;
        }
    }
    c.detail << "worst margin " << worst_margin;
}

// 11. derivative-Fourier identity on Z/7
void crit_deriv_fourier(Check& c) {
    FiniteGroupSpec G(7, 1, 1);
    Rng rng(1111);
    double worst = 0;
    for (int it = 0; it < 100; it++) {
        CplxFn f = random_one_bounded(G, rng);
        CplxFn g = random_one_bounded(G, rng);
        long long a = 1 + (long long)rng.below(6);
        auto [lhs, rhs] = deriv_fourier_sides(f, g, a);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    c.detail << "max gap " << worst;
    c.expect(worst <= 1e-9, "identity gap above 1e-9");
}

}  // namespace

std::vector<CriterionResult> run(const std::vector<int>& only) {
    struct Entry {
        int id;
        const char* name;
        std::function<void(Check&)> fn;
    };
    const std::vector<Entry> entries = {
        {1, "spectral identity", crit_spectral_identity},
        {2, "quadratic phase pipeline", crit_quadratic_pipeline},
        {3, "fractional-part polynomial parameter", crit_bracket_parameter},
        {4, "cocycle calculus", crit_cocycle_calculus},
        {5, "majority extension", crit_majority_extension},
        {6, "cube systems", crit_cube_systems},
        {7, "induced subgraph connectivity", crit_mc_connectivity},
        {8, "discrete Cauchy-Schwarz inequalities", crit_cs_inequalities},
        {9, "nil engine", crit_nil_engine},
        {10, "multilinear sampling", crit_multilin_sampling},
        {11, "derivative-Fourier identity", crit_deriv_fourier},
    };
    std::vector<CriterionResult> out;
    for (const auto& e : entries) {
        if (!only.empty() && std::find(only.begin(), only.end(), e.id) == only.end()) continue;
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail << (c.detail.tellp() > 0 ? "; " : "") << "exception: " << ex.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back({e.id, e.name, c.ok, secs, c.detail.str()});
    }
    return out;
}

}  // namespace hofa::acceptance
