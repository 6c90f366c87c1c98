#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mahler/poly.hpp"
#include "mahler/rational.hpp"

namespace mahler {

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

// Q(theta) = Q[x]/(m(x)) with m monic irreducible of degree >= 2, together
// with a complex embedding theta -> (root number `embedding` of m in the
// canonical root order). Immutable.
class NumberField {
public:
    static FieldPtr create(const QPoly& modulus, int embedding);

    const QPoly& modulus() const { return modulus_; }
    int degree() const { return degree_; }
    int embedding() const { return embedding_; }
    std::complex<long double> generator_value() const { return generator_value_; }

    bool same_as(const NumberField& other) const {
        return embedding_ == other.embedding_ && modulus_ == other.modulus_;
    }
    // Total order used only to make container orderings deterministic.
    int compare(const NumberField& other) const;

    std::string describe() const;

    // x^(n+k) mod m as coordinate vectors, k = 0..n-2.
    const std::vector<std::vector<Rational>>& reduction_table() const { return reduction_; }

private:
    NumberField() = default;

    QPoly modulus_;
    int degree_ = 0;
    int embedding_ = 0;
    std::complex<long double> generator_value_;
    std::vector<std::vector<Rational>> reduction_;
};

// An algebraic number. Rationals always live on the fast path (no field);
// irrational values are coordinate vectors in the power basis of a single
// number field. Mixing two different fields raises UnsupportedSplitting.
class Alg {
public:
    Alg() = default;
    Alg(int v) : q_(v) {}
    Alg(long v) : q_(v) {}
    Alg(const Rational& v) : q_(v) {}
    Alg(const Integer& v) : q_(v) {}

    static Alg generator(const FieldPtr& field);
    static Alg from_coords(const FieldPtr& field, std::vector<Rational> coords);
    // The root number `root_index` (canonical order) of an integer polynomial;
    // factors the polynomial and creates a field for the relevant factor.
    static Alg from_minpoly(const std::vector<Integer>& poly, int root_index);

    bool is_rational() const { return !field_; }
    const Rational& rational() const;
    const FieldPtr& field() const { return field_; }
    // Coordinates in the power basis (length = degree); for rationals: {q}.
    std::vector<Rational> coords(int degree = 1) const;

    bool is_zero() const { return !field_ && sgn(q_) == 0; }
    bool is_one() const { return !field_ && q_ == 1; }

    Alg operator-() const;
    friend Alg operator+(const Alg& a, const Alg& b);
    friend Alg operator-(const Alg& a, const Alg& b);
    friend Alg operator*(const Alg& a, const Alg& b);
    friend Alg operator/(const Alg& a, const Alg& b);
    Alg& operator+=(const Alg& b) { return *this = *this + b; }
    Alg& operator-=(const Alg& b) { return *this = *this - b; }
    Alg& operator*=(const Alg& b) { return *this = *this * b; }
    Alg& operator/=(const Alg& b) { return *this = *this / b; }

    Alg inverse() const;
    Alg pow(long e) const;

    friend bool operator==(const Alg& a, const Alg& b) { return a.compare(b) == 0; }
    friend bool operator!=(const Alg& a, const Alg& b) { return a.compare(b) != 0; }
    friend bool operator<(const Alg& a, const Alg& b) { return a.compare(b) < 0; }
    // Deterministic total order: rationals by value first, then field
    // elements by (field, coordinates). Not an order of the real line.
    int compare(const Alg& other) const;

    // Monic minimal polynomial over Q.
    QPoly minimal_polynomial() const;
    // Primitive integer minimal polynomial with positive leading coefficient.
    std::vector<Integer> minimal_polynomial_integer() const;
    int degree() const;
    // Index of this number among the roots of its minimal polynomial
    // (canonical order: real part, then imaginary part).
    int root_index() const;
    std::complex<long double> approx() const;

    // Norm and trace down to Q.
    Rational norm() const;
    Rational trace() const;
    // Matrix of multiplication by this element on the power basis of `field`.
    std::vector<std::vector<Rational>> multiplication_matrix(const FieldPtr& field) const;

    std::string to_string() const;

private:
    static Alg make(const FieldPtr& field, std::vector<Rational> coords);
    friend const FieldPtr& common_field(const Alg& a, const Alg& b);

    Rational q_;
    FieldPtr field_;
    std::vector<Rational> v_;
};

inline bool is_zero(const Alg& a) { return a.is_zero(); }

using AlgPoly = Poly<Alg>;

// Field shared by a and b (null for Q); throws UnsupportedSplitting if the
// two numbers live in different extensions.
const FieldPtr& common_field(const Alg& a, const Alg& b);
FieldPtr common_field(const std::vector<Alg>& xs);

AlgPoly to_alg_poly(const QPoly& f);
// Coefficients all rational?
std::optional<QPoly> to_rational_poly(const AlgPoly& f);

// Canonical text "root(x^2 - x - 1, 1)" style for irrational values.
std::string alg_to_json_string(const Alg& a);

}  // namespace mahler
