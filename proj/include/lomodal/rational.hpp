#pragma once

#include <cstdint>
#include <numeric>
#include <string>

namespace lomodal {

// Exact rational tags for positions inside eta-indexed sums.  Only the
// relative order matters; mediants keep numerators small when picking
// points between existing tags.
struct Rational {
    long long num = 0;
    long long den = 1; // > 0

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }

    static Rational mediant(const Rational& a, const Rational& b) {
        return Rational(a.num + b.num, a.den + b.den);
    }
    Rational below() const { return Rational(num - den, den); }
    Rational above() const { return Rational(num + den, den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

} // namespace lomodal
