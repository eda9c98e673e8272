#include "doctest.h"
#include "hofa/cube_system.hpp"
#include "hofa/util.hpp"

using namespace hofa;

namespace {

// S_{s+1} = zero set of the second derivative of x^2 over Z/5, lower levels full.
CubeSystem quadratic_zero_set_input(const FiniteGroupSpec& G) {
    CubeSystem S = CubeSystem::full(G, 1);
    auto idx = S.indexer(2);
    S.levels[2] = Bitset(idx.size());
    ZModOps ops{G.modulus()};
    std::vector<long long> sq(G.order());
    for (uint64_t x = 0; x < G.order(); x++) sq[x] = (long long)((x * x) % G.order());
    for (uint64_t i = 0; i < idx.size(); i++)
        if (derivative(ops, sq, idx.cube(i)) == 0) S.levels[2].set(i);
    return S;
}

// cubes entirely inside A or entirely inside B
CubeSystem two_block_system(const FiniteGroupSpec& G, int s, const std::vector<uint8_t>& blockA) {
    CubeSystem S(G, s);
    for (int k = 0; k <= s + 1; k++) {
        auto idx = S.indexer(k);
        for (uint64_t i = 0; i < idx.size(); i++) {
            CubeConfig c = idx.cube(i);
            bool allA = true, allB = true;
            for (uint32_t w = 0; w < (1u << k); w++) {
                if (blockA[c.vertex(w)])
                    allB = false;
                else
                    allA = false;
            }
            if (allA || allB) S.levels[k].set(i);
        }
    }
    return S;
}

}  // namespace

TEST_CASE("verify_system on the full system") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem S = CubeSystem::full(G, 1, Rat(1));
    auto rep = verify_system(S);
    CHECK(rep.holds);
    CHECK(rep.worst_popularity == Rat(1));
}

TEST_CASE("verify_system flags missing faces") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem S(G, 1);
    // empty S_0, one symmetric pair in S_1
    auto idx1 = S.indexer(1);
    S.insert(1, CubeConfig(G, 0, {2}));
    S.insert(1, CubeConfig(G, 2, {3}));  // reflection of (0;2)
    S.delta = Rat(0);
    auto rep = verify_system(S);
    CHECK(!rep.faces_ok);
    CHECK(!rep.holds);
    (void)idx1;
}

TEST_CASE("verify_system measures popularity on random subsets") {
    FiniteGroupSpec G(5, 1, 1);
    Rng rng(42);
    CubeSystem S = CubeSystem::full(G, 1);
    // knock out ~10% of the top level (keeping symmetry is not required for
    // the measurement to be well-defined)
    auto idx = S.indexer(2);
    for (uint64_t i = 0; i < idx.size(); i++)
        if (rng.below(10) == 0) S.levels[2].set(i, false);
    S.delta = Rat(1);
    auto rep = verify_system(S);
    CHECK(rep.worst_popularity < Rat(1));
    CHECK(rep.worst_popularity > Rat(0));
    CHECK(!rep.popularity_ok);
}

TEST_CASE("prune keeps full sets intact and pins delta") {
    FiniteGroupSpec G(5, 1, 1);
    int s = 1;
    CubeSystem in = CubeSystem::full(G, s);
    CubeSystem out = prune(in, Rat(1));
    // delta = 2^{-2s-4} (s+1)^{-2} = 1/256 for s=1
    CHECK(out.delta == Rat(1, 256));
    for (int k = 0; k <= s + 1; k++) CHECK(out.levels[k].count() == in.levels[k].count());
    CHECK(verify_system(out).holds);
}

TEST_CASE("prune of the quadratic zero set gives a verified system") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem in = quadratic_zero_set_input(G);
    uint64_t top_before = in.levels[2].count();
    Rat eps = in.density(2);
    CubeSystem out = prune(in, eps);
    CHECK(out.levels[2].count() > 0);
    CHECK(verify_system(out).holds);
    // deletion bound: at most (eps/2) |H|^{s+2} cubes leave the top level
    Rat removed((long long)(top_before - out.levels[2].count()));
    Rat bound = eps / Rat(2) * Rat(BigInt::pow(BigInt((long long)G.order()), 3));
    CHECK(removed <= bound);
}

TEST_CASE("nonempty systems have positive density at every level") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem in = quadratic_zero_set_input(G);
    CubeSystem out = prune(in, in.density(2));
    // mu(S_k) >= delta^{k+1}
    for (int k = 0; k <= out.s + 1; k++) CHECK(out.density(k) >= Rat::pow(out.delta, k + 1));
}

TEST_CASE("densify on full sets is the identity with delta = 0") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem in = CubeSystem::full(G, 1);
    auto res = densify(in);
    CHECK(res.certified);
    CHECK(res.delta == Rat(0));
    CHECK(res.system.delta == Rat(1));
    for (int k = 0; k <= 2; k++) CHECK(res.system.levels[k].count() == in.levels[k].count());
    CHECK(verify_system(res.system).holds);
}

TEST_CASE("densify after removing one 2-cube on Z/7") {
    FiniteGroupSpec G(7, 1, 1);
    CubeSystem in = CubeSystem::full(G, 1);
    in.levels[2].set(in.indexer(2).index(CubeConfig(G, 3, {1, 5})), false);
    // the explicit parameter chain is hopeless at this scale
    CHECK_THROWS_AS(densify(in, /*strict=*/true), ParameterTooWeakError);
    auto res = densify(in);
    CHECK(!res.certified);
    CHECK(verify_system(res.system).holds);
    CHECK(res.system.delta > Rat(0));
    // output parameter >= 1 - delta holds (vacuously when delta >= 1)
    CHECK(res.system.delta >= Rat(1) - res.delta);
    // measured densities: mu(S'_k) >= (1 - eta)^{k+1} when eta < 1
    if (res.eta < Rat(1))
        for (int k = 0; k <= 2; k++)
            CHECK(res.system.density(k) >= Rat::pow(Rat(1) - res.eta, k + 1));
}

TEST_CASE("patch recovers after losing one vertex on Z/11") {
    FiniteGroupSpec G(11, 1, 1);
    CubeSystem S = CubeSystem::full(G, 1, Rat(1));
    CubeSystem Sp = S;
    // delete the vertex 4 and, to honor S'_k subset of S_k as cube sets,
    // nothing else: patch must restore face closure by itself
    Sp.levels[0].set(4, false);
    auto res = patch(S, Sp);
    CHECK(res.system.levels[0].count() > 0);
    CHECK(!res.system.levels[0].get(4));
    CHECK(verify_system(res.system).holds);
    CHECK(res.measured_parameter > Rat(0));
    // measured parameter >= 1 - 3 * measured eta (vacuous if eta large)
    CHECK(res.measured_parameter >= Rat(1) - Rat(3) * res.eta);
}

TEST_CASE("patch with nothing removed returns the system unchanged") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem S = CubeSystem::full(G, 1, Rat(1));
    auto res = patch(S, S);
    for (int k = 0; k <= 2; k++) CHECK(res.system.levels[k] == S.levels[k]);
    CHECK(res.measured_parameter == Rat(1));
}

TEST_CASE("intersection parameter law") {
    FiniteGroupSpec G(11, 1, 1);
    CubeSystem A = CubeSystem::full(G, 1, Rat(1));
    CubeSystem Bp = A;
    Bp.levels[0].set(7, false);
    auto B = patch(A, Bp).system;
    CubeSystem I = intersect(A, B);
    // alpha + beta - 1 with alpha = 1
    CHECK(I.delta == A.delta + B.delta - Rat(1));
    I.delta = A.delta + B.delta - Rat(1);
    CHECK(verify_system(I).holds);
}

TEST_CASE("cheeger exact values") {
    SUBCASE("complete graph K4") {
        Graph g(4);
        for (int a = 0; a < 4; a++)
            for (int b = a + 1; b < 4; b++) g.add_edge(a, b);
        auto res = cheeger(g);
        CHECK(res.exact);
        CHECK(res.H == Rat(2));
        CHECK(res.h == Rat(1, 2));
    }
    SUBCASE("disconnected graph has Cheeger 0") {
        Graph g(4);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        auto res = cheeger(g);
        CHECK(res.H == Rat(0));
    }
    SUBCASE("one-vertex graph is infinite") {
        Graph g(1);
        CHECK(cheeger(g).infinite);
    }
    SUBCASE("empty graph is an error") {
        Graph g(0);
        CHECK_THROWS_AS(cheeger(g), ArgumentError);
    }
}

TEST_CASE("split finds the two blocks on Z/13") {
    FiniteGroupSpec G(13, 1, 1);
    std::vector<uint8_t> blockA(13, 0);
    for (int x = 0; x <= 5; x++) blockA[x] = 1;
    CubeSystem S = two_block_system(G, 1, blockA);
    S.delta = verify_system(S).worst_popularity;
    REQUIRE(S.delta > Rat(0));
    Rat eps = Rat::pow(S.delta, 4) / Rat(4);
    auto res = split(S, eps);
    CHECK(res.components.size() == 2);
    CHECK(verify_system(res.system).holds);
    // K <= 1/delta'
    CHECK(Rat((long long)res.components.size()) <= Rat(1) / res.delta_prime);
    CHECK(res.component_systems.size() == 2);
    for (auto& cs : res.component_systems) CHECK(cs.levels[0].count() > 0);
}

TEST_CASE("split leaves the full system alone") {
    FiniteGroupSpec G(7, 1, 1);
    CubeSystem S = CubeSystem::full(G, 1, Rat(1));
    auto res = split(S, Rat(1, 64));
    CHECK(res.components.size() == 1);
    CHECK(res.iterations == 0);
    CHECK(res.system.levels[2].count() == S.levels[2].count());
}

TEST_CASE("split cuts a badly expanding cycle at the relaxed knob") {
    // S_1 = nearest-neighbour pairs on Z/13: the component graph is the
    // 13-cycle, whose Cheeger constant 1/3 is below eps|H| = 2 at C=1,
    // so the cut path runs.
    FiniteGroupSpec G(13, 1, 1);
    CubeSystem S(G, 1);
    S.levels[0] = Bitset(13, true);
    for (uint64_t x = 0; x < 13; x++) {
        for (uint64_t a : {0ull, 1ull, 12ull}) {
            S.insert(1, CubeConfig(G, x, {a}));
            for (uint64_t b : {0ull, 1ull, 12ull}) S.insert(2, CubeConfig(G, x, {a, b}));
        }
    }
    S.delta = verify_system(S).worst_popularity;
    REQUIRE(S.delta == Rat(3, 13));
    auto res = split(S, S.delta, /*C=*/1);
    CHECK(res.iterations >= 1);
    CHECK(verify_system(res.system).holds);
    CHECK(Rat((long long)res.components.size()) <= Rat(1) / res.delta_prime);
}

TEST_CASE("split rejects oversized eps") {
    FiniteGroupSpec G(5, 1, 1);
    CubeSystem S = CubeSystem::full(G, 1, Rat(1, 2));
    CHECK_THROWS_AS(split(S, Rat(1)), ArgumentError);
}

TEST_CASE("mc_connectivity") {
    SUBCASE("complete graph is always connected") {
        Graph g(8);
        for (int a = 0; a < 8; a++)
            for (int b = a + 1; b < 8; b++) g.add_edge(a, b);
        auto res = mc_connectivity(g, 5, 500, 7);
        CHECK(res.empirical == 1.0);
        CHECK(res.empirical >= res.bound - 3 * res.sigma);
    }
    SUBCASE("disconnected graph gives a vacuous bound") {
        Graph g(4);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        auto res = mc_connectivity(g, 3, 100, 7);
        CHECK(res.bound_vacuous);
        CHECK(res.empirical >= res.bound - 3 * res.sigma);
    }
    SUBCASE("K20 minus a perfect matching") {
        Graph g(20);
        for (int a = 0; a < 20; a++)
            for (int b = a + 1; b < 20; b++)
                if (!(b == a + 1 && a % 2 == 0)) g.add_edge(a, b);
        auto res = mc_connectivity(g, 12, 10000, 20260101);
        CHECK(res.empirical >= res.bound - 3 * res.sigma);
        CHECK(res.empirical > 0.99);
    }
}
