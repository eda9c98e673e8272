#include <complex>

#include "doctest.h"
#include "hofa/group.hpp"
#include "hofa/util.hpp"

using namespace hofa;

TEST_CASE("enumerate gives canonical orders") {
    FiniteGroupSpec z3(3, 1, 1);
    auto e3 = enumerate(z3);
    CHECK(e3 == std::vector<uint64_t>{0, 1, 2});

    FiniteGroupSpec z2sq(2, 1, 2);
    auto e4 = enumerate(z2sq);
    REQUIRE(e4.size() == 4);
    // lexicographic tuples (0,0),(0,1),(1,0),(1,1)
    CHECK(z2sq.coord(e4[1], 0) == 0);
    CHECK(z2sq.coord(e4[1], 1) == 1);
    CHECK(z2sq.coord(e4[2], 0) == 1);
    CHECK(z2sq.coord(e4[2], 1) == 0);

    FiniteGroupSpec z9(3, 2, 1);
    CHECK(z9.order() == 9);
    CHECK(enumerate(z9).back() == 8);
}

TEST_CASE("enumerate is a bijection and group ops are consistent") {
    FiniteGroupSpec G(5, 1, 2);
    std::vector<int> seen(G.order(), 0);
    for (uint64_t x : enumerate(G)) seen[x]++;
    for (int s : seen) CHECK(s == 1);
    Rng rng(3);
    for (int it = 0; it < 200; it++) {
        uint64_t a = rng.below(G.order()), b = rng.below(G.order());
        CHECK(G.sub(G.add(a, b), b) == a);
        CHECK(G.add(a, G.neg(a)) == 0);
        CHECK(G.scale(3, a) == G.add(a, G.add(a, a)));
    }
}

TEST_CASE("order cap raises size error") {
    CHECK_THROWS_AS(FiniteGroupSpec(101, 1, 4), SizeError);
    CHECK_THROWS_AS(FiniteGroupSpec(4, 1, 1), ArgumentError);  // composite without flag
    CHECK_NOTHROW(FiniteGroupSpec(4, 1, 1, true));
}

TEST_CASE("unit inverse") {
    FiniteGroupSpec G(7, 1, 1);
    CHECK(G.unit_inverse(3) == 5);  // 3*5 = 15 = 1 mod 7
    CHECK(G.divide_by_unit(6, 3) == 2);
    CHECK_THROWS_AS(FiniteGroupSpec(3, 2, 1).unit_inverse(3), ArgumentError);
}

TEST_CASE("fourier of a character is a delta") {
    FiniteGroupSpec G(5, 1, 1);
    for (uint64_t a = 0; a < 5; a++) {
        CplxFn f(G);
        for (uint64_t x = 0; x < 5; x++) f[x] = G.character(a, x);
        auto fhat = fourier_transform(f);
        for (uint64_t b = 0; b < 5; b++) {
            double expect = (a == b) ? 1.0 : 0.0;
            CHECK(std::abs(fhat[b] - Cplx(expect, 0)) < 1e-12);
        }
    }
}

TEST_CASE("fourier of the delta at 0 on Z/4 is flat 1/4") {
    FiniteGroupSpec G(4, 1, 1, true);
    CplxFn f(G);
    f[0] = 1.0;
    auto fhat = fourier_transform(f);
    for (auto c : fhat) CHECK(std::abs(c - Cplx(0.25, 0)) < 1e-12);
}

TEST_CASE("fourier of (1,2,3) on Z/3") {
    FiniteGroupSpec G(3, 1, 1);
    CplxFn f(G);
    f[0] = 1.0;
    f[1] = 2.0;
    f[2] = 3.0;
    auto fhat = fourier_transform(f);
    CHECK(std::abs(fhat[0] - Cplx(2, 0)) < 1e-12);
    CHECK(std::abs(std::abs(fhat[1]) - 1.0 / std::sqrt(3.0)) < 1e-12);
    CHECK(std::abs(std::abs(fhat[2]) - 1.0 / std::sqrt(3.0)) < 1e-12);
}

TEST_CASE("parseval and double inversion on random functions") {
    for (long long N : {5, 7}) {
        FiniteGroupSpec G(N, 1, 1);
        Rng rng(99 + (uint64_t)N);
        for (int it = 0; it < 100; it++) {
            CplxFn f(G);
            for (uint64_t x = 0; x < G.order(); x++) f[x] = Cplx(rng.unit() * 2 - 1, rng.unit() * 2 - 1);
            auto fhat = fourier_transform(f);
            double lhs = 0, rhs = 0;
            for (auto c : fhat) lhs += std::norm(c);
            for (auto c : f.v) rhs += std::norm(c);
            rhs /= (double)G.order();
            CHECK(std::abs(lhs - rhs) < 1e-9);
            CplxFn back = fourier_invert(G, fhat);
            for (uint64_t x = 0; x < G.order(); x++) CHECK(std::abs(back[x] - f[x]) < 1e-9);
        }
    }
}
