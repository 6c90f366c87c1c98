#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/rational.hpp"

namespace mahler {

// A ramified Laurent series sum c_e z^e known up to an explicit exponent
// bound: every term with exponent < precision() is stored (zeros omitted);
// nothing is known at or beyond it. An exact series (polynomial in z^(+-1/k))
// has no precision bound.
class Puiseux {
public:
    using Terms = std::map<Rational, Alg>;

    Puiseux() = default;  // exact zero
    Puiseux(const Alg& c);  // exact constant
    Puiseux(int c) : Puiseux(Alg(c)) {}

    static Puiseux monomial(const Alg& c, const Rational& e);
    static Puiseux z(const Rational& e = Rational(1)) { return monomial(Alg(1), e); }
    // 0 + O(z^n)
    static Puiseux big_o(const Rational& n);
    static Puiseux from_terms(Terms terms, std::optional<Rational> precision = std::nullopt);

    bool is_exact() const { return !prec_.has_value(); }
    const std::optional<Rational>& precision() const { return prec_; }
    const Terms& terms() const { return terms_; }

    // True when no known coefficient is nonzero (the series may still be O(z^N)).
    bool is_zero() const { return terms_.empty(); }
    bool is_exact_zero() const { return terms_.empty() && !prec_; }
    bool known(const Rational& e) const { return !prec_ || e < *prec_; }
    Alg coeff(const Rational& e) const;  // PrecisionLoss if unknown

    // Least common denominator of stored exponents (1 for the zero series).
    long ramification() const;
    Rational valuation() const;          // IndeterminateValuation if is_zero()
    Alg leading_coefficient() const;     // IndeterminateValuation if is_zero()
    // Valuation when known, otherwise the precision (a lower bound).
    Rational valuation_lower_bound() const;

    Puiseux truncated(const Rational& n) const;  // forget everything >= n
    Puiseux exact_truncation(const Rational& n) const;  // keep terms < n, mark exact
    Puiseux part_below(const Rational& e) const;    // exact part of terms with exponent < e
    Puiseux part_from(const Rational& e) const;     // terms >= e, same precision
    Puiseux constant_part() const { return Puiseux(coeff(Rational(0))); }

    Puiseux operator-() const;
    friend Puiseux operator+(const Puiseux& a, const Puiseux& b);
    friend Puiseux operator-(const Puiseux& a, const Puiseux& b);
    friend Puiseux operator*(const Puiseux& a, const Puiseux& b);
    friend Puiseux operator*(const Alg& c, const Puiseux& a);
    Puiseux& operator+=(const Puiseux& b) { return *this = *this + b; }
    Puiseux& operator-=(const Puiseux& b) { return *this = *this - b; }
    Puiseux& operator*=(const Puiseux& b) { return *this = *this * b; }

    Puiseux shift(const Rational& e) const;  // multiply by z^e
    // Multiplicative inverse. Exact inputs that are not monomials produce an
    // infinite expansion, cut at `target`; truncated inputs lose 2*val terms.
    Puiseux inverse(const Rational& target) const;

    // z -> z^m (m > 0 rational). Precision scales by m.
    Puiseux substitute(const Rational& m) const;
    // sigma^j with sigma(z) = z^p (j may be negative).
    Puiseux sigma(long j, long p) const;

    // Same terms and same precision status.
    friend bool operator==(const Puiseux& a, const Puiseux& b) {
        return a.prec_ == b.prec_ && a.terms_ == b.terms_;
    }
    // Terms agree wherever both are known.
    bool agrees_with(const Puiseux& other) const;

    // "3*z^-1 + 1/2*z^(1/2) + O(z^5)".
    std::string to_string() const;

private:
    void erase_from_precision();

    Terms terms_;
    std::optional<Rational> prec_;
};

using TruncatedPuiseux = Puiseux;

inline bool is_zero(const Puiseux& f) { return f.is_exact_zero(); }

// Exact integer power sigma factor p^j as a rational (j may be negative).
Rational p_power(long p, long j);

// Finite window of a Hahn series: the listed exponents carry exact
// coefficients; `complete` says the list is the whole support in
// [lower, upper].
struct TruncatedHahn {
    std::vector<std::pair<Rational, Alg>> terms;
    Rational lower, upper;
    bool complete = true;
    std::string to_string() const;
};

// Parses the series grammar: sums/products of rational constants, z, z^e with
// e an integer or (a/b), parentheses, and an optional O(z^N) term.
Puiseux parse_puiseux(const std::string& text);

}  // namespace mahler
