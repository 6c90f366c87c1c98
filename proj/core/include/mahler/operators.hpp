#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/factor.hpp"
#include "mahler/matrix.hpp"
#include "mahler/series.hpp"

namespace mahler {

using SeriesMatrix = Matrix<Puiseux>;

// L = sum_i a_i Phi^i with Phi f(z) = f(z^p). Coefficients are usually exact
// Laurent polynomials in z^(1/k); factors produced by factor_by_slopes carry
// truncated coefficients.
class MahlerOperator {
public:
    MahlerOperator() = default;
    MahlerOperator(long p, std::vector<Puiseux> coeffs);

    long p() const { return p_; }
    int order() const { return static_cast<int>(a_.size()) - 1; }
    const std::vector<Puiseux>& coeffs() const { return a_; }
    const Puiseux& coeff(int i) const { return a_[static_cast<std::size_t>(i)]; }
    bool is_exact() const;
    bool is_zero() const { return a_.empty(); }

    friend MahlerOperator operator+(const MahlerOperator& a, const MahlerOperator& b);
    friend MahlerOperator operator-(const MahlerOperator& a, const MahlerOperator& b);
    // Composition (a Phi^i)(b Phi^j) = a sigma^i(b) Phi^(i+j).
    friend MahlerOperator operator*(const MahlerOperator& a, const MahlerOperator& b);
    friend MahlerOperator operator*(const Puiseux& c, const MahlerOperator& a);

    Puiseux apply(const Puiseux& f) const;

    // Polynomial coefficients in z (or z^(1/k)) with no common z-power and
    // the lowest nonzero coefficient of the first nonzero a_i equal to 1.
    MahlerOperator normalized() const;

    bool same_up_to_unit(const MahlerOperator& other) const;

    // "(1 - 2*z) + (-1 + 2*z)*M + (z^2)*M^2 @ p=2"
    std::string to_string() const;

private:
    long p_ = 2;
    std::vector<Puiseux> a_;
};

// phi(Y) = A Y with A = num / den (den an exact nonzero series, usually a
// polynomial; num entries exact or truncated).
struct MahlerSystem {
    long p = 2;
    SeriesMatrix num;
    Puiseux den = Puiseux(1);

    std::size_t dim() const { return num.rows(); }
    // Entries of A as series known at least below exponent n.
    SeriesMatrix series(const Rational& n) const;
};

MahlerOperator parse_operator(const std::string& text);

// Newton polygon: lower hull of (p^i, val a_i).
struct NewtonEdge {
    Rational slope;
    int start = 0, end = 0;       // operator indices of the edge end points
    int multiplicity = 0;         // end - start
    AlgPoly characteristic;       // sum over edge points of cld(a_l) x^(l - start)
    std::vector<Alg> exponents;   // nonzero roots with multiplicity
};
struct NewtonData {
    std::vector<std::pair<Rational, Rational>> vertices;  // (p^i, val a_i)
    std::vector<NewtonEdge> edges;
};
NewtonData newton_polygon(const MahlerOperator& l);

MahlerSystem equation_to_companion(const MahlerOperator& l);

// R[A] = sigma(R) A R^{-1}, entries known below exponent n.
MahlerSystem gauge_apply(const SeriesMatrix& r, const MahlerSystem& a, const Rational& n);

// Inverse of a series matrix by Gauss-Jordan with minimal-valuation pivots.
SeriesMatrix series_inverse(const SeriesMatrix& m, const Rational& target);
// Inverse computed at working precision `work`, truncated to what is determined.
SeriesMatrix series_inverse_best(const SeriesMatrix& m, const Rational& work);
SeriesMatrix sigma(const SeriesMatrix& m, long j, long p);
SeriesMatrix truncate(const SeriesMatrix& m, const Rational& n);

struct CyclicResult {
    MahlerOperator op;
    // P = diag(1/q_k) V satisfies P[A] = companion(op); row k of V is the
    // k-th iterate of the cyclic vector.
    SeriesMatrix V;
    std::vector<Puiseux> q;
    int candidates_tried = 0;
};
// Cyclic vector search: e_i, then e_1 + z^j e_k, up to `budget` candidates.
CyclicResult system_to_operator(const MahlerSystem& a, int budget = 50);

// Finds the sigma-relation between orbit vectors u_0..u_m (exact rows, the
// first m independent): det(V) Phi^m - sum (u_m adj V)_k Phi^k.
// Rank of exact row vectors, evaluated at sample points (a lower bound that
// is exact for all but finitely many degenerate samples).
std::size_t generic_rank(const std::vector<std::vector<Puiseux>>& rows);

MahlerOperator operator_from_orbit(const std::vector<std::vector<Puiseux>>& orbit, long p);

struct DivisionResult {
    MahlerOperator quotient, remainder;
};
DivisionResult right_divide(const MahlerOperator& l, const MahlerOperator& m, const Rational& precision);

struct FirstOrderFactor {
    long p = 2;
    Rational nu;     // z^nu Phi - c, then times h^{-1}
    Rational slope;  // nu / (p - 1)
    Alg c;
    Puiseux h;       // val 0, cld 1, truncated
    MahlerOperator as_operator(const Rational& precision) const;
};
struct Factorization {
    Puiseux unit;                           // a in L = a L_d ... L_1
    std::vector<FirstOrderFactor> factors;  // factors[0] is the rightmost
    FieldPtr field;                         // field holding all exponents
    Alg generator_image;                    // embedding of the operator's field
    Rational achieved_precision;            // min precision of the h series
};
// Factors L into single-slope first-order pieces, smallest slope rightmost.
Factorization factor_by_slopes(const MahlerOperator& l, const Rational& precision);

struct GuessResult {
    MahlerOperator op;
    int order = 0, degree = 0;
    Rational verified_to;  // all known coefficients below this exponent vanish
    long equations = 0, unknowns = 0;
};
// Hermite-Pade guessing of a polynomial-coefficient relation; candidate only.
std::optional<GuessResult> guess_minimal_operator(const Puiseux& f, long p, int max_order, int max_degree);

// Substitute z -> z^m in all coefficients.
MahlerOperator substitute(const MahlerOperator& l, const Rational& m);

}  // namespace mahler
