#include <algorithm>

#include "doctest.h"
#include "hofa/cube.hpp"
#include "hofa/util.hpp"

using namespace hofa;

namespace {
// independent vertex-table oracle for restrictions
bool restriction_matches(const CubeConfig& c, Face F, const CubeConfig& r) {
    if (r.dim() != F.dim()) return false;
    for (uint32_t w = 0; w < (1u << F.dim()); w++)
        if (r.vertex(w) != c.vertex(F.embed(w))) return false;
    return true;
}
}  // namespace

TEST_CASE("restrict cube to codimension-1 faces") {
    FiniteGroupSpec G(5, 1, 1);
    CubeConfig c(G, 0, {1, 2});
    auto lo = restrict_cube(c, Face::lower_codim1(1, 2));
    CHECK(lo == CubeConfig(G, 0, {2}));
    auto hi = restrict_cube(c, Face::upper_codim1(1, 2));
    CHECK(hi == CubeConfig(G, 1, {2}));

    FiniteGroupSpec G7(7, 1, 1);
    CubeConfig d(G7, 1, {2, 3, 4});
    Face F(0b010, 0b111);  // omega_2 = 1
    auto r = restrict_cube(d, F);
    CHECK(restriction_matches(d, F, r));
    CHECK(r.x == 4);  // 1 + h_2 = 4
    CHECK(r.h == std::vector<uint64_t>{2, 4});

    CHECK_THROWS_AS(restrict_cube(c, Face(0b11, 0b01)), ArgumentError);
}

TEST_CASE("glue places cubes on opposite faces") {
    FiniteGroupSpec G(5, 1, 1);
    CubeConfig c0(G, 0, {1}), c1(G, 2, {1});
    auto g = glue_cubes(c0, c1, 2);
    CHECK(g == CubeConfig(G, 0, {1, 2}));
    CHECK(restriction_matches(g, Face::lower_codim1(2, 2), c0));
    CHECK(restriction_matches(g, Face::upper_codim1(2, 2), c1));

    // glue(c, c, i) restricted to both i-faces gives back c
    auto gg = glue_cubes(c0, c0, 1);
    CHECK(restrict_cube(gg, Face::lower_codim1(1, 2)) == c0);
    CHECK(restrict_cube(gg, Face::upper_codim1(1, 2)) == c0);

    // two 0-cubes glue to the 1-cube [x,y]
    CubeConfig p(G, 3, {}), q(G, 1, {});
    auto e = glue_cubes(p, q, 1);
    CHECK(e == CubeConfig(G, 3, {G.sub(1, 3)}));

    CHECK_THROWS_AS(glue_cubes(c0, CubeConfig(G, 0, {1, 1}), 1), ArgumentError);
}

TEST_CASE("duplicate") {
    FiniteGroupSpec G(5, 1, 1);
    // box^2 of a point is the constant 2-cube
    CubeConfig pt(G, 3, {});
    auto c2 = duplicate_cube(pt, Face(0, 0), 2);
    for (uint32_t w = 0; w < 4; w++) CHECK(c2.vertex(w) == 3);

    // duplicating a 1-cube along the edge in direction 1 leaves direction 2 constant
    CubeConfig e(G, 0, {3});
    auto d = duplicate_cube(e, Face(0, 0b01), 2);
    CHECK(d == CubeConfig(G, 0, {3, 0}));

    // duplicate then restrict to F is the identity
    auto back = restrict_cube(d, Face(0, 0b01));
    CHECK(back == e);

    CHECK_THROWS_AS(duplicate_cube(e, Face(0, 0b11), 2), ArgumentError);
}

TEST_CASE("derivative examples") {
    FiniteGroupSpec G5(5, 1, 1);
    ZModOps z5{5};
    std::vector<long long> sq(5);
    for (int x = 0; x < 5; x++) sq[x] = (x * x) % 5;
    CHECK(derivative(z5, sq, CubeConfig(G5, 0, {1, 1})) == 2);

    // constant functions have zero derivative in every dimension
    std::vector<long long> cst(5, 3);
    CHECK(derivative(z5, cst, CubeConfig(G5, 2, {1, 3})) == 0);
    CHECK(derivative(z5, cst, CubeConfig(G5, 2, {4})) == 0);

    FiniteGroupSpec G7(7, 1, 1);
    ZModOps z7{7};
    std::vector<long long> id7(7);
    for (int x = 0; x < 7; x++) id7[x] = x;
    CHECK(derivative(z7, id7, CubeConfig(G7, 3, {2})) == 5);  // -2 mod 7
}

TEST_CASE("derivative is invariant under coordinate permutation") {
    FiniteGroupSpec G(7, 1, 1);
    RatOps ops;
    Rng rng(11);
    std::vector<Rat> f(7);
    for (auto& v : f) v = rng.rat_in_unit();
    for (int it = 0; it < 50; it++) {
        uint64_t x = rng.below(7);
        std::vector<uint64_t> h = {rng.below(7), rng.below(7), rng.below(7)};
        auto hp = h;
        std::swap(hp[0], hp[2]);
        CHECK(derivative(ops, f, CubeConfig(G, x, h)) == derivative(ops, f, CubeConfig(G, x, hp)));
    }
}

TEST_CASE("cube orthogonality identity, exhaustive k <= 5") {
    for (int k = 0; k <= 5; k++) {
        for (uint32_t w = 0; w < (1u << k); w++) {
            for (uint32_t wp = 0; wp < (1u << k); wp++) {
                if ((w & wp) != w) continue;  // need w subset of wp
                long long s = 0;
                for (uint32_t eta = 0; eta < (1u << k); eta++)
                    if ((eta & w) == w && (eta & wp) == eta) s += (popcount32(eta) & 1) ? -1 : 1;
                long long expect = (w == wp) ? ((popcount32(w) & 1) ? -1 : 1) : 0;
                CHECK(s == expect);
            }
        }
    }
}

TEST_CASE("z_coeff basics") {
    // omega = omega' of weight <= r: single term
    CHECK(z_coeff(1, 0b01, 0b01) == 1);
    CHECK(z_coeff(0, 0, 0) == 1);
    CHECK(z_coeff(2, 0b011, 0b011) == 1);
    // omega does not contain omega'
    CHECK(z_coeff(3, 0b01, 0b10) == 0);
    // k=2, r=1: Z(11,00) = -1
    CHECK(z_coeff(1, 0b11, 0b00) == -1);
}

TEST_CASE("normal form transform") {
    RatOps ops;
    SUBCASE("k=1 r=0 example") {
        VertexLabelling<Rat> tau(1);
        tau[0] = Rat(3);
        tau[1] = Rat(1);
        auto taup = normal_form_transform(ops, tau, 0);
        CHECK(taup[0] == Rat(2));
        CHECK(taup[1] == Rat(0));
        auto dec = normal_form_defect_decomposition(ops, tau, 0);
        // tau - tau' must equal sum (-1)^{|eta|} coeff 1_{F_eta}
        for (uint32_t w = 0; w < 2; w++) {
            Rat recon(0);
            for (auto& [eta, coeff] : dec)
                if ((w & eta) == w) recon += (popcount32(eta) & 1) ? -coeff : coeff;
            CHECK(recon == tau[w] - taup[w]);
        }
    }
    SUBCASE("constant tau at r=0 maps to zero") {
        VertexLabelling<Rat> tau(1);
        tau[0] = tau[1] = Rat(7, 3);
        auto taup = normal_form_transform(ops, tau, 0);
        CHECK(taup[0] == Rat(0));
        CHECK(taup[1] == Rat(0));
    }
    SUBCASE("idempotent, linear, and kills high weights") {
        Rng rng(5);
        for (int k = 1; k <= 4; k++) {
            for (int r = 0; r < k; r++) {
                VertexLabelling<Rat> a(k), b(k);
                for (uint32_t w = 0; w < (1u << k); w++) {
                    a[w] = rng.rat_in_unit();
                    b[w] = rng.rat_in_unit();
                }
                auto na = normal_form_transform(ops, a, r);
                for (uint32_t w = 0; w < (1u << k); w++)
                    if (popcount32(w) >= r + 1) CHECK(na[w] == Rat(0));
                auto nna = normal_form_transform(ops, na, r);
                CHECK(nna == na);
                // linearity: N(a+b) = N(a) + N(b)
                VertexLabelling<Rat> ab(k);
                for (uint32_t w = 0; w < (1u << k); w++) ab[w] = a[w] + b[w];
                auto nab = normal_form_transform(ops, ab, r);
                auto nb = normal_form_transform(ops, b, r);
                for (uint32_t w = 0; w < (1u << k); w++) CHECK(nab[w] == na[w] + nb[w]);
                // defect decomposition reconstructs a - na
                auto dec = normal_form_defect_decomposition(ops, a, r);
                for (uint32_t w = 0; w < (1u << k); w++) {
                    Rat recon(0);
                    for (auto& [eta, coeff] : dec)
                        if ((w & eta) == w) recon += (popcount32(eta) & 1) ? -coeff : coeff;
                    CHECK(recon == a[w] - na[w]);
                }
            }
        }
    }
}

TEST_CASE("discrete leibniz rule") {
    SUBCASE("alpha constant one") {
        VertexLabelling<Rat> a(1), b(1);
        a[0] = a[1] = Rat(1);
        b[0] = Rat(5, 2);
        b[1] = Rat(1, 3);
        auto [lhs, rhs] = leibniz_sides(a, b);
        CHECK(lhs == b[0] - b[1]);
        CHECK(lhs == rhs);
    }
    SUBCASE("beta constant one") {
        VertexLabelling<Rat> a(2), b(2);
        Rng rng(8);
        for (uint32_t w = 0; w < 4; w++) {
            a[w] = rng.rat_in_unit();
            b[w] = Rat(1);
        }
        auto [lhs, rhs] = leibniz_sides(a, b);
        RatOps ops;
        CHECK(lhs == alternating_sum(ops, a));
        CHECK(lhs == rhs);
    }
    SUBCASE("random rational tables at k=3") {
        Rng rng(21);
        for (int it = 0; it < 25; it++) {
            VertexLabelling<Rat> a(3), b(3);
            for (uint32_t w = 0; w < 8; w++) {
                a[w] = rng.rat_in_unit() - rng.rat_in_unit();
                b[w] = rng.rat_in_unit() - rng.rat_in_unit();
            }
            auto [lhs, rhs] = leibniz_sides(a, b);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("tricube identity") {
    FiniteGroupSpec G(7, 1, 1);
    RatOps ops;
    SUBCASE("k=1 explicit entries") {
        FiniteGroupSpec G5(5, 1, 1);
        auto tc = tricube(G5, 0, {1}, {2});
        REQUIRE(tc.size() == 2);
        CHECK(tc[0].first == 1);
        CHECK(tc[0].second == CubeConfig(G5, 0, {1}));
        CHECK(tc[1].first == -1);
        CHECK(tc[1].second == CubeConfig(G5, 2, {G5.sub(1, 2)}));
    }
    SUBCASE("signed sum equals derivative at (x, h') for random f, k=2") {
        Rng rng(13);
        std::vector<Rat> f(7);
        for (auto& v : f) v = rng.rat_in_unit();
        for (int it = 0; it < 40; it++) {
            uint64_t x = rng.below(7);
            std::vector<uint64_t> h = {rng.below(7), rng.below(7)};
            std::vector<uint64_t> hp = {rng.below(7), rng.below(7)};
            Rat sum(0);
            for (auto& [sgn, cube] : tricube(G, x, h, hp)) {
                Rat d = derivative(ops, f, cube);
                sum += sgn > 0 ? d : -d;
            }
            CHECK(sum == derivative(ops, f, CubeConfig(G, x, hp)));
        }
    }
    SUBCASE("h = h' reduces to the plain derivative") {
        Rng rng(14);
        std::vector<Rat> f(7);
        for (auto& v : f) v = rng.rat_in_unit();
        std::vector<uint64_t> h = {3, 5};
        Rat sum(0);
        for (auto& [sgn, cube] : tricube(G, 2, h, h)) {
            Rat d = derivative(ops, f, cube);
            sum += sgn > 0 ? d : -d;
        }
        CHECK(sum == derivative(ops, f, CubeConfig(G, 2, h)));
    }
}

TEST_CASE("glueing identities for derivatives") {
    FiniteGroupSpec G(5, 1, 1);
    RatOps ops;
    Rng rng(31);
    std::vector<Rat> f(5);
    for (auto& v : f) v = rng.rat_in_unit();
    SUBCASE("extension relates to the shifted function") {
        // partial^{k+1} f([c, c+box(h)]) = partial^k f(c) - partial^k (f o shift_h)(c)
        for (int it = 0; it < 30; it++) {
            uint64_t x = rng.below(5), hnew = rng.below(5);
            std::vector<uint64_t> h = {rng.below(5), rng.below(5)};
            CubeConfig c(G, x, h);
            std::vector<Rat> shifted(5);
            for (uint64_t y = 0; y < 5; y++) shifted[y] = f[G.add(y, hnew)];
            Rat lhs = derivative(ops, f, extend_cube(c, hnew));
            CHECK(lhs == derivative(ops, f, c) - derivative(ops, shifted, c));
        }
    }
    SUBCASE("cocycle identity of glued triples") {
        // with shared upper face: partial g(c) = partial g(c0) - partial g(c1)
        for (int it = 0; it < 30; it++) {
            int k = 2, i = 1 + (int)rng.below(2);
            uint64_t x = rng.below(5), hp = rng.below(5);
            std::vector<uint64_t> h = {rng.below(5), rng.below(5)};
            CubeConfig c(G, x, h);
            auto h0 = h;
            h0[i - 1] = G.add(h[i - 1], hp);
            CubeConfig c0(G, x, h0);
            auto h1 = h;
            h1[i - 1] = hp;
            CubeConfig c1(G, G.add(x, h[i - 1]), h1);
            (void)k;
            CHECK(derivative(ops, f, c) == derivative(ops, f, c0) - derivative(ops, f, c1));
        }
    }
}
