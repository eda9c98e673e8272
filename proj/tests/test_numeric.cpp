#include "doctest.h"
#include "hofa/bigint.hpp"
#include "hofa/rational.hpp"
#include "hofa/util.hpp"

using namespace hofa;

TEST_CASE("bigint arithmetic agrees with int64 on random operands") {
    Rng rng(12345);
    for (int it = 0; it < 2000; it++) {
        long long a = rng.range(-1000000000LL, 1000000000LL);
        long long b = rng.range(-1000000000LL, 1000000000LL);
        BigInt A(a), B(b);
        CHECK((A + B).to_i64() == a + b);
        CHECK((A - B).to_i64() == a - b);
        CHECK((A * B).to_i64() == a * b);
        if (b != 0) {
            BigInt q, r;
            BigInt::divmod(A, B, q, r);
            CHECK(q.to_i64() == a / b);
            CHECK(r.to_i64() == a % b);
        }
    }
}

TEST_CASE("bigint handles multi-limb values") {
    BigInt a = BigInt::from_string("123456789012345678901234567890");
    BigInt b = BigInt::from_string("987654321098765432109876543210");
    CHECK((a * b).to_string() == "121932631137021795226185032733622923332237463801111263526900");
    BigInt q, r;
    BigInt::divmod(b, a, q, r);
    CHECK(q.to_i64() == 8);
    CHECK((a * BigInt(8) + r) == b);
    CHECK(BigInt::gcd(a, b).to_string() == "9000000000900000000090");
    CHECK(BigInt::pow(BigInt(2), 100).to_string() == "1267650600228229401496703205376");
    CHECK(BigInt::pow(BigInt(11), 40) == BigInt::pow(BigInt(11), 13) * BigInt::pow(BigInt(11), 27));
    CHECK(BigInt::from_string("-42").to_i64() == -42);
    CHECK((-a).to_string() == "-123456789012345678901234567890");
}

TEST_CASE("bigint division invariants on random wide operands") {
    Rng rng(777);
    for (int it = 0; it < 300; it++) {
        BigInt a(1), b(1);
        int la = (int)rng.range(1, 5), lb = (int)rng.range(1, 3);
        for (int i = 0; i < la; i++) a *= BigInt(rng.range(1, 1LL << 31));
        for (int i = 0; i < lb; i++) b *= BigInt(rng.range(1, 1LL << 31));
        if (rng.below(2)) a = -a;
        if (rng.below(2)) b = -b;
        BigInt q, r;
        BigInt::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        CHECK(r.abs() < b.abs());
        if (!r.is_zero()) CHECK(r.sign() == a.sign());
    }
}

TEST_CASE("rational arithmetic and normalization") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
    CHECK((Rat(1, 3) * Rat(3, 7)) == Rat(1, 7));
    CHECK((Rat(1, 3) / Rat(3, 7)) == Rat(7, 9));
    CHECK(Rat(7, 2).floor() == BigInt(3));
    CHECK(Rat(-7, 2).floor() == BigInt(-4));
    CHECK(Rat(-7, 2).frac() == Rat(1, 2));
    CHECK(Rat(5, 4).round_nearest() == BigInt(1));
    CHECK(Rat(7, 4).round_nearest() == BigInt(2));
    CHECK(Rat::from_string("-3/9") == Rat(-1, 3));
    CHECK(Rat(1, 3).to_string() == "1/3");
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(doctest::Approx(Rat(1, 3).to_double()) == 1.0 / 3.0);
}

TEST_CASE("rational to_double is accurate for huge denominators") {
    Rat r(BigInt(1), BigInt::pow(BigInt(11), 30));
    double expect = std::pow(11.0, -30.0);
    CHECK(std::abs(r.to_double() - expect) <= 1e-15 * expect);
}

TEST_CASE("parallel_sum is deterministic and correct") {
    long long direct = 0;
    for (size_t i = 0; i < 20000; i++) direct += (long long)(i * i % 97);
    long long par = parallel_sum<long long>(20000, 0, [](size_t i) { return (long long)(i * i % 97); });
    CHECK(par == direct);
}
