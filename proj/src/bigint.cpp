#include "hofa/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hofa {

BigInt::BigInt(long long v) {
    if (v == 0) return;
    sign_ = v > 0 ? 1 : -1;
    unsigned long long m = v > 0 ? (unsigned long long)v : 0ULL - (unsigned long long)v;
    while (m) {
        limbs_.push_back((uint32_t)(m & 0xffffffffULL));
        m >>= 32;
    }
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<uint32_t> r(big.size() + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < big.size(); i++) {
        uint64_t s = carry + big[i] + (i < small.size() ? small[i] : 0u);
        r[i] = (uint32_t)s;
        carry = s >> 32;
    }
    r[big.size()] = (uint32_t)carry;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    assert(cmp_mag(a, b) >= 0);
    std::vector<uint32_t> r(a.size(), 0);
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); i++) {
        int64_t s = (int64_t)a[i] - borrow - (i < b.size() ? (int64_t)b[i] : 0);
        if (s < 0) {
            s += ((int64_t)1 << 32);
            borrow = 1;
        } else {
            borrow = 0;
        }
        r[i] = (uint32_t)s;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint32_t> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); i++) {
        uint64_t carry = 0;
        uint64_t ai = a[i];
        for (size_t j = 0; j < b.size(); j++) {
            uint64_t s = (uint64_t)r[i + j] + ai * b[j] + carry;
            r[i + j] = (uint32_t)s;
            carry = s >> 32;
        }
        size_t k = i + b.size();
        while (carry) {
            uint64_t s = (uint64_t)r[k] + carry;
            r[k] = (uint32_t)s;
            carry = s >> 32;
            k++;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// Binary long division on magnitudes.  Slow but simple; operands at desk
// scale are a few hundred bits.
void BigInt::divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
    assert(!b.empty());
    q.assign(a.size(), 0);
    r.clear();
    if (cmp_mag(a, b) < 0) {
        r = a;
        q.clear();
        return;
    }
    // single-limb divisor fast path
    if (b.size() == 1) {
        uint64_t d = b[0], rem = 0;
        q = a;
        for (size_t i = a.size(); i-- > 0;) {
            uint64_t cur = (rem << 32) | a[i];
            q[i] = (uint32_t)(cur / d);
            rem = cur % d;
        }
        while (!q.empty() && q.back() == 0) q.pop_back();
        if (rem) r.push_back((uint32_t)rem);
        return;
    }
    size_t nbits = a.size() * 32;
    std::vector<uint32_t> rem;
    for (size_t i = nbits; i-- > 0;) {
        // rem = rem*2 + bit i of a
        uint32_t carry = (a[i / 32] >> (i % 32)) & 1u;
        for (size_t j = 0; j < rem.size(); j++) {
            uint32_t nc = rem[j] >> 31;
            rem[j] = (rem[j] << 1) | carry;
            carry = nc;
        }
        if (carry) rem.push_back(carry);
        if (cmp_mag(rem, b) >= 0) {
            rem = sub_mag(rem, b);
            q[i / 32] |= (1u << (i % 32));
        }
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    r = rem;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
        r.limbs_ = BigInt::add_mag(a.limbs_, b.limbs_);
        r.sign_ = a.sign_;
    } else {
        int c = BigInt::cmp_mag(a.limbs_, b.limbs_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.limbs_ = BigInt::sub_mag(a.limbs_, b.limbs_);
            r.sign_ = a.sign_;
        } else {
            r.limbs_ = BigInt::sub_mag(b.limbs_, a.limbs_);
            r.sign_ = b.sign_;
        }
    }
    r.trim();
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
    BigInt r;
    r.limbs_ = BigInt::mul_mag(a.limbs_, b.limbs_);
    r.sign_ = a.sign_ * b.sign_;
    r.trim();
    return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
    if (a.sign_ == 0) {
        q = BigInt();
        r = BigInt();
        return;
    }
    std::vector<uint32_t> qm, rm;
    divmod_mag(a.limbs_, b.limbs_, qm, rm);
    q.limbs_ = std::move(qm);
    q.sign_ = q.limbs_.empty() ? 0 : a.sign_ * b.sign_;
    r.limbs_ = std::move(rm);
    r.sign_ = r.limbs_.empty() ? 0 : a.sign_;
}

BigInt BigInt::operator/(const BigInt& b) const {
    BigInt q, r;
    divmod(*this, b, q, r);
    return q;
}

BigInt BigInt::operator%(const BigInt& b) const {
    BigInt q, r;
    divmod(*this, b, q, r);
    return r;
}

std::strong_ordering BigInt::operator<=>(const BigInt& o) const {
    if (sign_ != o.sign_) return sign_ <=> o.sign_;
    int c = cmp_mag(limbs_, o.limbs_) * sign_;
    return c <=> 0;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.sign_ = a.limbs_.empty() ? 0 : 1;
    b.sign_ = b.limbs_.empty() ? 0 : 1;
    while (!b.is_zero()) {
        BigInt q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

BigInt BigInt::pow(BigInt base, unsigned long long e) {
    BigInt r(1);
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

size_t BigInt::bit_length() const {
    if (limbs_.empty()) return 0;
    uint32_t top = limbs_.back();
    size_t b = 0;
    while (top) {
        top >>= 1;
        b++;
    }
    return (limbs_.size() - 1) * 32 + b;
}

bool BigInt::fits_i64() const {
    if (limbs_.size() > 2) return false;
    if (limbs_.size() < 2) return true;
    uint64_t m = ((uint64_t)limbs_[1] << 32) | limbs_[0];
    return sign_ > 0 ? m <= 0x7fffffffffffffffULL : m <= 0x8000000000000000ULL;
}

long long BigInt::to_i64() const {
    assert(fits_i64());
    uint64_t m = 0;
    if (limbs_.size() >= 1) m |= limbs_[0];
    if (limbs_.size() >= 2) m |= (uint64_t)limbs_[1] << 32;
    return sign_ >= 0 ? (long long)m : -(long long)m;
}

double BigInt::to_double() const {
    double r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + limbs_[i];
    return sign_ < 0 ? -r : r;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    std::vector<uint32_t> m = limbs_;
    std::string digits;
    while (!m.empty()) {
        // divide magnitude by 10^9
        uint64_t rem = 0;
        for (size_t i = m.size(); i-- > 0;) {
            uint64_t cur = (rem << 32) | m[i];
            m[i] = (uint32_t)(cur / 1000000000ULL);
            rem = cur % 1000000000ULL;
        }
        while (!m.empty() && m.back() == 0) m.pop_back();
        for (int d = 0; d < 9; d++) {
            digits.push_back('0' + (char)(rem % 10));
            rem /= 10;
        }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (sign_ < 0) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

BigInt BigInt::from_string(const std::string& s) {
    BigInt r;
    size_t i = 0;
    int sg = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        if (s[i] == '-') sg = -1;
        i++;
    }
    if (i >= s.size()) throw std::invalid_argument("BigInt: empty numeral");
    for (; i < s.size(); i++) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
        r = r * BigInt(10) + BigInt(s[i] - '0');
    }
    if (sg < 0) r = -r;
    return r;
}

size_t BigInt::hash() const {
    size_t h = (size_t)sign_ * 0x9e3779b97f4a7c15ULL;
    for (uint32_t l : limbs_) h = h * 1099511628211ULL + l;
    return h;
}

}  // namespace hofa
