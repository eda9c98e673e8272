#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace hofa {

// Arbitrary-precision signed integer.  Magnitude is stored as base-2^32
// limbs, little-endian, with no leading zero limb; sign_ is 0 iff the
// value is zero.  Division truncates toward zero, like built-in integers.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v);

    static BigInt from_string(const std::string& s);

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }
    bool odd() const { return !limbs_.empty() && (limbs_[0] & 1u); }

    bool fits_i64() const;
    long long to_i64() const;
    double to_double() const;
    std::string to_string() const;

    BigInt operator-() const;
    BigInt abs() const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    // Truncated division: a = q*b + r with |r| < |b| and sign(r) = sign(a).
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    BigInt operator/(const BigInt& b) const;
    BigInt operator%(const BigInt& b) const;

    std::strong_ordering operator<=>(const BigInt& o) const;
    bool operator==(const BigInt& o) const { return sign_ == o.sign_ && limbs_ == o.limbs_; }

    static BigInt gcd(BigInt a, BigInt b);
    static BigInt pow(BigInt base, unsigned long long e);

    // Number of significant bits of the magnitude (0 for zero).
    size_t bit_length() const;
    size_t hash() const;

private:
    int sign_ = 0;
    std::vector<uint32_t> limbs_;

    void trim();
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static void divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                           std::vector<uint32_t>& q, std::vector<uint32_t>& r);
};

}  // namespace hofa
