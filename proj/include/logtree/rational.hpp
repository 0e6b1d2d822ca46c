#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace logtree {

using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline BigInt factorial_big(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline BigInt binomial_big(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

/// H_m = sum_{j<=m} 1/j as an exact rational.
inline Rat harmonic(unsigned m) {
    Rat h = 0;
    for (unsigned j = 1; j <= m; ++j) h += Rat(1, j);
    return h;
}

/// H_m^(2) = sum_{j<=m} 1/j^2.
inline Rat harmonic2(unsigned m) {
    Rat h = 0;
    for (unsigned j = 1; j <= m; ++j) h += Rat(1, BigInt(j) * j);
    return h;
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline std::string rat_to_string(const Rat& r) {
    return r.str();  // "p/q" or "p"
}

// Small numeric-trait shims so templated table code works for both Rat and double.
template <typename T>
struct num_traits;

template <>
struct num_traits<Rat> {
    static Rat from_fraction(const BigInt& p, const BigInt& q) { return Rat(p, q); }
    static Rat from_int(long v) { return Rat(v); }
    static constexpr bool exact = true;
};

template <>
struct num_traits<double> {
    static double from_fraction(const BigInt& p, const BigInt& q) {
        return Rat(p, q).convert_to<double>();
    }
    static double from_int(long v) { return static_cast<double>(v); }
    static constexpr bool exact = false;
};

}  // namespace logtree
