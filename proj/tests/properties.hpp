#pragma once

// Randomized property checks shared by the unit suites and the acceptance
// runner. Each returns the number of cases checked and the first violation.

#include <cmath>
#include <string>

#include "mahler/examples.hpp"
#include "mahler/growth.hpp"
#include "mahler/reduction.hpp"
#include "support.hpp"

namespace mahler::testing {

struct PropertyOutcome {
    bool ok = true;
    std::size_t cases = 0;
    std::string detail;

    void fail(const std::string& what) {
        if (ok) detail = what;
        ok = false;
    }
    void check(bool cond, const std::string& what) {
        ++cases;
        if (!cond) fail(what);
    }
};

namespace detail {

inline bool matrices_agree(const SeriesMatrix& a, const SeriesMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!a(i, j).agrees_with(b(i, j))) return false;
    return true;
}

inline SeriesMatrix random_gauge(std::mt19937& rng, std::size_t n) {
    for (;;) {
        SeriesMatrix r(n, n);
        AlgMatrix c0(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                r(i, j) = random_poly(rng, 2, 2);
                c0(i, j) = r(i, j).terms().count(Rational(0)) ? r(i, j).terms().at(Rational(0)) : Alg(0);
            }
        if (try_inverse(c0)) return r;
    }
}

}  // namespace detail

// I[A] = A and (RS)[A] = R[S[A]] for random invertible polynomial gauges.
inline PropertyOutcome gauge_action_laws(unsigned seed, int iterations) {
    PropertyOutcome out;
    std::mt19937 rng(seed);
    const Rational n(8);
    for (int it = 0; it < iterations; ++it) {
        const long p = uniform(rng, 2, 3);
        const std::size_t d = static_cast<std::size_t>(uniform(rng, 2, 3));
        MahlerSystem a = random_system(rng, p, static_cast<int>(d), 2);
        a.num = a.num + SeriesMatrix::identity(d).map([](const Puiseux& x) { return Puiseux(2) * x; });
        MahlerSystem id = gauge_apply(SeriesMatrix::identity(d), a, n);
        out.check(detail::matrices_agree(id.series(n), a.series(n)), "identity gauge changed the system");
        SeriesMatrix r = detail::random_gauge(rng, d), s = detail::random_gauge(rng, d);
        MahlerSystem lhs = gauge_apply(r * s, a, n);
        MahlerSystem rhs = gauge_apply(r, gauge_apply(s, a, n + 4), n);
        out.check(detail::matrices_agree(lhs.series(n), rhs.series(n)), "(RS)[A] != R[S[A]]");
    }
    return out;
}

// M = D + N (D semisimple, N nilpotent, DN = ND) and M = UD = DU.
inline PropertyOutcome dunford_exactness(unsigned seed, int iterations) {
    PropertyOutcome out;
    std::mt19937 rng(seed);
    for (int it = 0; it < iterations; ++it) {
        const std::size_t n = static_cast<std::size_t>(uniform(rng, 2, 4));
        // Conjugate a Jordan-type matrix with repeated eigenvalues.
        AlgMatrix j(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            j(i, i) = Alg(uniform(rng, -2, 2) == 0 ? 1 : uniform(rng, 1, 2));
            if (i + 1 < n && uniform(rng, 0, 1)) j(i, i + 1) = Alg(1);
        }
        AlgMatrix p;
        do {
            p = random_rational_matrix(rng, n, 2);
        } while (!try_inverse(p));
        AlgMatrix m = p * j * inverse(p);
        AdditiveDunford ad = dunford_additive(m);
        out.check(ad.D + ad.N == m, "D + N != M");
        out.check(ad.D * ad.N == ad.N * ad.D, "DN != ND");
        out.check(matrix_pow(ad.N, static_cast<long>(n)).is_zero_matrix(), "N not nilpotent");
        out.check(poly_of_matrix(squarefree_part(charpoly(m)), ad.D).is_zero_matrix(), "D not semisimple");
        MultiplicativeDunford md = dunford_multiplicative(m);
        out.check(md.U * md.D == m && md.D * md.U == m, "UD != M or DU != M");
        out.check(matrix_pow(md.U - AlgMatrix::identity(n), static_cast<long>(n)).is_zero_matrix(), "U not unipotent");
    }
    return out;
}

// h(xy) <= h(x) + h(y), h(x + y) <= h(x) + h(y) + log 2, h(1/x) = h(x).
inline PropertyOutcome weil_height_subadditivity(unsigned seed, int iterations) {
    PropertyOutcome out;
    std::mt19937 rng(seed);
    const long double tol = 1e-9L;
    const Alg s = Alg::from_minpoly({Integer(-2), Integer(0), Integer(1)}, 1);
    for (int it = 0; it < iterations; ++it) {
        Rational x = random_rational(rng, 200, true), y = random_rational(rng, 200, true);
        out.check(weil_height(Rational(x * y)) <= weil_height(x) + weil_height(y) + tol, "product bound (Q)");
        out.check(weil_height(Rational(x + y)) <= weil_height(x) + weil_height(y) + std::log(2.0L) + tol,
                  "sum bound (Q)");
        out.check(std::fabs(weil_height(Rational(1 / x)) - weil_height(x)) < tol, "inverse (Q)");
        Alg u = Alg(random_rational(rng, 5)) + Alg(random_rational(rng, 5)) * s;
        Alg v = Alg(random_rational(rng, 5)) + Alg(random_rational(rng, 5)) * s;
        if (u.is_zero() || v.is_zero()) continue;
        out.check(weil_height(u * v) <= weil_height(u) + weil_height(v) + tol, "product bound (Q(sqrt 2))");
        out.check(weil_height(u + v) <= weil_height(u) + weil_height(v) + std::log(2.0L) + tol,
                  "sum bound (Q(sqrt 2))");
        out.check(std::fabs(weil_height(u.inverse()) - weil_height(u)) < tol, "inverse (Q(sqrt 2))");
    }
    return out;
}

// inverse_pullback(pullback(g)) = g, and pulled-back operators annihilate
// pulled-back solutions.
inline PropertyOutcome pullback_round_trips(unsigned seed, int iterations) {
    PropertyOutcome out;
    const MahlerOperator l = rudin_shapiro_operator();
    auto basis = solution_basis(l, Rational(12));
    for (long nu : {1L, 3L})
        for (long k : {0L, 1L, 2L}) {
            MahlerOperator lp = pullback(l, nu, k);
            for (const auto& g : basis) {
                GeneralizedSeries h = pullback(g, 2, nu, k);
                const std::string tag = " (nu=" + std::to_string(nu) + ", k=" + std::to_string(k) + ")";
                // Standardizing after the substitution may cost a fraction of
                // an exponent of precision; known coefficients must agree.
                GeneralizedSeries back = inverse_pullback(h, 2, nu, k);
                out.check(standardize(back - g, 2).is_zero(), "round trip" + tag);
                out.check(*back.precision() >= *g.precision() - 1, "precision loss" + tag);
                out.check(standardize(apply_operator(lp, h), 2).is_zero(), "pulled-back solution" + tag);
            }
        }
    std::mt19937 rng(seed);
    for (int it = 0; it < iterations; ++it) {
        const long p = uniform(rng, 2, 3), nu = uniform(rng, 0, 1) ? 1 : 5, k = uniform(rng, 0, 2);
        XiExpr x = XiExpr::xi(random_xi_index(rng, 2), Puiseux(Alg(uniform(rng, 1, 3))) * z(-uniform(rng, 0, 2)));
        GeneralizedSeries g =
            GeneralizedSeries::single(Alg(uniform(rng, 1, 2)), static_cast<int>(uniform(rng, 0, 1)), x);
        out.check(standardize(inverse_pullback(pullback(g, p, nu, k), p, nu, k), p) == standardize(g, p),
                  "random round trip " + g.to_string());
    }
    return out;
}

// Shifts preserve the filtration degree, products add, sigma^-1 sums add one
// and standardization does not increase it.
inline PropertyOutcome filtration_degree_bounds(unsigned seed, int iterations) {
    PropertyOutcome out;
    std::mt19937 rng(seed);
    auto random_expr = [&rng]() {
        XiExpr x;
        const long n = uniform(rng, 1, 2);
        for (long i = 0; i < n; ++i)
            x.add(XiExpr::xi(random_xi_index(rng), Puiseux(Alg(uniform(rng, 1, 3))) * z(-uniform(rng, 0, 1))));
        return x;
    };
    for (int it = 0; it < iterations; ++it) {
        const long p = uniform(rng, 2, 3);
        XiExpr x = random_expr(), y = random_expr();
        const int dx = x.filtration_degree(), dy = y.filtration_degree();
        out.check(sigma(x, uniform(rng, -2, 2), p).filtration_degree() <= dx, "shift " + x.to_string());
        out.check(xi_multiply(x, y, p).filtration_degree() <= dx + dy, "product " + x.to_string());
        out.check(xi_sigma_inverse_sum(0, Alg(1), x, p).filtration_degree() <= dx + 1, "sum " + x.to_string());
        out.check(standardize(x, p).filtration_degree() <= dx, "standardize " + x.to_string());
    }
    return out;
}

}  // namespace mahler::testing
