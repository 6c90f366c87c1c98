#pragma once

#include <utility>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/poly.hpp"

namespace mahler {

// Squarefree decomposition (Yun): f = lc * prod g_i^i with g_i monic,
// squarefree and pairwise coprime. Returns the nonconstant (g_i, i).
template <class T>
std::vector<std::pair<Poly<T>, int>> squarefree_decomposition(const Poly<T>& f) {
    std::vector<std::pair<Poly<T>, int>> out;
    if (f.degree() <= 0) return out;
    Poly<T> fm = f.monic();
    Poly<T> d1 = fm.derivative();
    Poly<T> b = poly_gcd(fm, d1);
    Poly<T> c = fm / b;
    Poly<T> d = d1 / b - c.derivative();
    int i = 1;
    while (c.degree() > 0) {
        Poly<T> a = poly_gcd(c, d);
        if (a.degree() > 0) out.emplace_back(a, i);
        Poly<T> c2 = c / a;
        d = d / a - c2.derivative();
        c = c2;
        ++i;
    }
    return out;
}

// Irreducible monic factors over Q with multiplicities, in a deterministic
// order (degree, then coefficients).
std::vector<std::pair<QPoly, int>> factor_rational(const QPoly& f);

// Irreducible monic factors over the number field generated by the
// coefficients of f (Trager's norm method), with multiplicities.
std::vector<std::pair<AlgPoly, int>> factor_over_field(const AlgPoly& f);

// Image of x (an element of the field `image` was computed from) under the
// field embedding sending the old generator to `image`.
Alg embed(const Alg& x, const Alg& image);
AlgPoly embed(const AlgPoly& f, const Alg& image);

// A field in which a polynomial splits completely, with its roots.
struct Splitting {
    FieldPtr field;              // null when every root is rational
    Alg generator_image;         // image of the input field's generator (0 for Q)
    std::vector<Alg> roots;      // with multiplicity, sorted by Alg::compare
};

// Splits f over a single simple extension of the coefficient field. Throws
// UnsupportedSplitting if the absolute degree would exceed `max_degree`.
// `base` is the field to split over when every coefficient is rational.
Splitting split_polynomial(const AlgPoly& f, int max_degree = 12, const FieldPtr& base = nullptr);

// All roots in the algebraic closure of a rational polynomial as minimal
// polynomial + root-index labels (one field per irreducible factor).
std::vector<Alg> roots_by_minpoly(const QPoly& f);

}  // namespace mahler
