#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hofa/bigint.hpp"

namespace hofa {

// Exact rational number.  Invariant: den_ > 0 and gcd(num_, den_) = 1;
// zero is stored as 0/1.
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(long long v) : num_(v), den_(1) {}
    Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }
    Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    explicit Rat(BigInt n) : num_(std::move(n)), den_(1) {}

    // Accepts "p" or "p/q".
    static Rat from_string(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rat(BigInt::from_string(s));
        return Rat(BigInt::from_string(s.substr(0, slash)), BigInt::from_string(s.substr(slash + 1)));
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigInt(1); }
    int sign() const { return num_.sign(); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        if (a.den_ == b.den_) return Rat(a.num_ + b.num_, a.den_);
        return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        if (a.den_ == b.den_) return Rat(a.num_ - b.num_, a.den_);
        return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num_ * b.num_, a.den_ * b.den_); }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.is_zero()) throw std::domain_error("Rat: division by zero");
        return Rat(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rat operator-() const {
        Rat r = *this;
        r.num_ = -r.num_;
        return r;
    }
    Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
    Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
    Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }
    Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

    bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const Rat& o) const { return (num_ * o.den_) <=> (o.num_ * den_); }

    Rat abs() const { return num_.sign() < 0 ? -*this : *this; }

    // Largest integer <= value.
    BigInt floor() const {
        BigInt q, r;
        BigInt::divmod(num_, den_, q, r);
        if (r.sign() < 0) q = q - BigInt(1);
        return q;
    }
    // Fractional part in [0, 1).
    Rat frac() const { return *this - Rat(floor()); }
    // Nearest integer; half-way cases round toward +infinity.
    BigInt round_nearest() const { return (*this + Rat(1, 2)).floor(); }

    double to_double() const {
        if (is_zero()) return 0.0;
        size_t nb = num_.bit_length(), db = den_.bit_length();
        // scale so the quotient carries ~64 significant bits
        long shift = 64 - (long)nb + (long)db;
        BigInt scaled = shift >= 0 ? num_ * BigInt::pow(BigInt(2), (unsigned long long)shift)
                                   : num_ / BigInt::pow(BigInt(2), (unsigned long long)(-shift));
        double q = (scaled / den_).to_double();
        return std::ldexp(q, (int)-shift);
    }

    std::string to_string() const {
        if (is_integer()) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }

    size_t hash() const { return num_.hash() * 31 + den_.hash(); }

    static Rat pow(const Rat& b, unsigned long long e) {
        return Rat(BigInt::pow(b.num(), e), BigInt::pow(b.den(), e));
    }

private:
    BigInt num_, den_;
    void normalize() {
        if (den_.is_zero()) throw std::domain_error("Rat: zero denominator");
        if (den_.sign() < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_.is_zero()) {
            den_ = BigInt(1);
            return;
        }
        BigInt g = BigInt::gcd(num_, den_);
        if (!(g == BigInt(1))) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
    }
};

struct RatHash {
    size_t operator()(const Rat& r) const { return r.hash(); }
};

}  // namespace hofa
