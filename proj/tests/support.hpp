#pragma once

// Shared generators and oracles for the test suites.

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/linalg.hpp"
#include "mahler/operators.hpp"
#include "mahler/series.hpp"
#include "mahler/xi.hpp"

namespace mahler {
// Readable gtest failure messages.
inline void PrintTo(const Puiseux& f, std::ostream* os) { *os << f.to_string(); }
inline void PrintTo(const XiExpr& x, std::ostream* os) { *os << x.to_string(); }
inline void PrintTo(const Alg& x, std::ostream* os) { *os << x.to_string(); }
inline void PrintTo(const GeneralizedSeries& g, std::ostream* os) { *os << g.to_string(); }
}  // namespace mahler

namespace mahler::testing {

inline Puiseux z(long e = 1) { return Puiseux::z(Rational(e)); }
inline Puiseux zq(long num, long den) { return Puiseux::z(make_rational(num, den)); }

inline long uniform(std::mt19937& rng, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

inline Rational random_rational(std::mt19937& rng, long bound = 9, bool nonzero = false) {
    for (;;) {
        Rational r = make_rational(uniform(rng, -bound, bound), uniform(rng, 1, bound));
        if (!nonzero || sgn(r) != 0) return r;
    }
}

// Polynomial in z with integer coefficients in [-c, c], degree <= deg.
inline Puiseux random_poly(std::mt19937& rng, int deg, long c = 3, bool nonzero_constant = false) {
    Puiseux::Terms t;
    for (int k = 0; k <= deg; ++k) {
        long v = uniform(rng, -c, c);
        if (k == 0 && nonzero_constant && v == 0) v = 1;
        if (v != 0) t.emplace(Rational(k), Alg(v));
    }
    return Puiseux::from_terms(std::move(t));
}

// Random xi index with t <= max_len, |alpha| <= max_alpha, small lambda and
// positive a-entries.
inline XiIndex random_xi_index(std::mt19937& rng, int max_len = 3, int max_alpha = 2, int min_len = 1) {
    const int t = static_cast<int>(uniform(rng, min_len, max_len));
    std::vector<int> alpha;
    std::vector<Alg> lambda;
    std::vector<Rational> a;
    const long lambdas[] = {1, -1, 2, -2, 3};
    for (int i = 0; i < t; ++i) {
        alpha.push_back(static_cast<int>(uniform(rng, 0, max_alpha)));
        lambda.emplace_back(lambdas[uniform(rng, 0, 4)]);
        a.push_back(make_rational(uniform(rng, 1, 4), uniform(rng, 1, 3)));
    }
    return XiIndex(std::move(alpha), std::move(lambda), std::move(a));
}

// Operator of order 1..3 with a nonzero constant coefficient.
inline MahlerOperator random_operator(std::mt19937& rng, long p, int max_order = 3, int deg = 3) {
    const int d = static_cast<int>(uniform(rng, 1, max_order));
    std::vector<Puiseux> cs;
    for (int i = 0; i <= d; ++i) {
        Puiseux c = random_poly(rng, deg, 2, i == 0 || i == d);
        Puiseux shifted = i == 0 ? c : c.shift(Rational(uniform(rng, 0, 2)));
        cs.push_back(shifted);
    }
    return MahlerOperator(p, std::move(cs));
}

// Random d x d system with polynomial entries (not all zero) over a denominator 1.
inline MahlerSystem random_system(std::mt19937& rng, long p, int d, int deg) {
    MahlerSystem a;
    a.p = p;
    for (;;) {
        a.num = SeriesMatrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
        bool any = false;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                a.num(i, j) = random_poly(rng, deg);
                any = any || !a.num(i, j).is_zero();
            }
        if (any) return a;
    }
}

inline AlgMatrix random_rational_matrix(std::mt19937& rng, std::size_t n, long bound = 4) {
    AlgMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Alg(uniform(rng, -bound, bound));
    return m;
}

// Leibniz determinant (small matrices only).
inline Puiseux leibniz_det(const SeriesMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Puiseux det;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        Puiseux term(inversions % 2 ? -1 : 1);
        for (std::size_t i = 0; i < n; ++i) term = term * m(i, perm[i]);
        det = det + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// ---- Hahn-window oracle
//
// A window is the finite list of coefficients of an xi expression at
// negative exponents, built from the defining sums with cumulative indices
// bounded by `depth`. A term with a deeper cumulative index K has a
// denominator divisible by p^(K - c) for a small c depending on the
// a-entries, so comparisons restricted to exponents whose p-part of the
// denominator is at most p^(depth - margin) are exact.
using Window = std::map<Rational, Alg>;

inline long p_depth(const Rational& e, long p) {
    return sgn(e) == 0 ? 0 : std::max(0L, -padic_valuation(e, p));
}

inline void window_add(Window& w, const Rational& e, const Alg& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = w.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) w.erase(it);
    }
}

// Lowest exponent an expression with exact coefficients can reach.
inline Rational window_floor(const XiExpr& x) {
    Rational lo(0);
    for (const auto& [w, f] : x.terms()) {
        Rational e = f.is_zero() ? Rational(0) : f.valuation();
        lo = std::min(lo, Rational(e - w.a_sum() - 1));
    }
    return lo;
}

inline Window hahn_window(const XiExpr& x, long p, const Rational& lower, int depth) {
    Window out;
    for (const auto& [w, f] : x.terms()) {
        if (w.empty()) {
            for (const auto& [e, c] : f.terms())
                if (e >= lower && sgn(e) < 0) window_add(out, e, c);
            continue;
        }
        Rational amin = *std::min_element(w.a.begin(), w.a.end());
        Rational upper = -amin / Rational(2);
        for (int k = 0; k < depth; ++k) upper /= Rational(p);
        Rational fmax(0);
        for (const auto& [e, c] : f.terms()) fmax = std::max(fmax, e);
        TruncatedHahn h = xi_expand(w, upper, p, Rational(lower - fmax), depth);
        for (const auto& [ex, cx] : h.terms)
            for (const auto& [ef, cf] : f.terms()) {
                Rational e = ex + ef;
                if (e >= lower && sgn(e) < 0) window_add(out, e, cx * cf);
            }
    }
    return out;
}

inline Window window_scale(const Window& w, const Rational& factor) {
    Window out;
    for (const auto& [e, c] : w) window_add(out, e * factor, c);
    return out;
}

inline Window window_product(const Window& x, const Window& y, const Rational& lower) {
    Window out;
    for (const auto& [ex, cx] : x)
        for (const auto& [ey, cy] : y)
            if (ex + ey >= lower) window_add(out, ex + ey, cx * cy);
    return out;
}

struct WindowMatch {
    bool equal = true;
    std::size_t compared = 0;
    std::string detail;
};

// Compares two windows on exponents in [lower, upper] with p-depth <= max_depth.
inline WindowMatch windows_match(const Window& x, const Window& y, long p, const Rational& lower,
                                 const Rational& upper, long max_depth) {
    WindowMatch m;
    std::map<Rational, bool> keys;
    for (const auto& kv : x) keys[kv.first] = true;
    for (const auto& kv : y) keys[kv.first] = true;
    for (const auto& [e, unused] : keys) {
        (void)unused;
        if (e < lower || e > upper || p_depth(e, p) > max_depth) continue;
        ++m.compared;
        Alg a = x.count(e) ? x.at(e) : Alg(0), b = y.count(e) ? y.at(e) : Alg(0);
        if (a != b && m.equal) {
            m.equal = false;
            m.detail = "z^(" + to_string(e) + "): " + a.to_string() + " vs " + b.to_string();
        }
    }
    return m;
}

// Like windows_match, but the right-hand side is evaluated exactly at each
// compared exponent (direct enumeration of the defining sums). Candidate
// exponents are the keys of `lhs` plus a shallow expansion of `rhs`.
inline WindowMatch window_matches_exact(const Window& lhs, const XiExpr& rhs, long p, const Rational& lower,
                                        const Rational& upper, long max_depth, int key_depth = 8) {
    Window keys = lhs;
    for (const auto& kv : hahn_window(rhs, p, lower, key_depth)) keys.emplace(kv.first, kv.second);
    Window exact;
    for (const auto& kv : keys) {
        const Rational& e = kv.first;
        if (e < lower || e > upper || p_depth(e, p) > max_depth) continue;
        window_add(exact, e, xi_coefficient(rhs, e, p));
    }
    return windows_match(lhs, exact, p, lower, upper, max_depth);
}

}  // namespace mahler::testing
