#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace mahler {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const Integer& x) { return sgn(x) == 0; }

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

Integer floor_of(const Rational& x);
Integer ceil_of(const Rational& x);

// "num/den", or just "num" for integers.
std::string to_string(const Rational& x);
std::string to_string(const Integer& x);

// Accepts "a", "-a", "a/b" with optional surrounding whitespace; throws ParseError.
Rational parse_rational(const std::string& text);

Rational pow(const Rational& base, long exponent);

// p-adic valuation of a nonzero rational.
long padic_valuation(const Rational& x, long p);
long padic_valuation(const Integer& x, long p);

// Splits a positive rational r = eta * p^u with eta having numerator and
// denominator prime to p.
void split_p_power(const Rational& r, long p, Rational& eta, long& u);

Integer binomial(long n, long k);

// Conversion helpers for small values; throw InvalidArgument when out of range.
long to_long(const Integer& x);
long to_long(const Rational& x);
double to_double(const Rational& x);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);

// Checked 64-bit arithmetic; throws PrecisionLoss on overflow, which in this
// library only happens on absurd ramification requests.
std::int64_t mul64(std::int64_t a, std::int64_t b);
std::int64_t add64(std::int64_t a, std::int64_t b);

}  // namespace mahler
