#include <gtest/gtest.h>

#include "mahler/examples.hpp"
#include "mahler/reduction.hpp"
#include "support.hpp"

using namespace mahler;
using namespace mahler::testing;

namespace {

SeriesMatrix as_series(const AlgMatrix& c) {
    SeriesMatrix m(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) m(i, j) = Puiseux(c(i, j));
    return m;
}

bool all_zero(const SeriesMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero()) return false;
    return true;
}

AlgMatrix random_triangular(std::mt19937& rng, std::size_t n, const std::vector<long>& diag) {
    AlgMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        c(i, i) = Alg(diag[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(diag.size()) - 1))]);
        for (std::size_t j = i + 1; j < n; ++j) c(i, j) = Alg(uniform(rng, -2, 2));
    }
    return c;
}

// Reduction is a genuine gauge: residual zero, F1 invertible, F2 unipotent.
void expect_valid_reduction(const ReductionResult& r, const std::string& what) {
    EXPECT_TRUE(r.residual.zero) << what << ": " << r.residual.first_nonzero;
    EXPECT_FALSE(leibniz_det(r.F1).is_zero()) << what;
    for (std::size_t i = 0; i < r.F2.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            XiExpr expected = i == j ? XiExpr(Puiseux(1)) : XiExpr();
            EXPECT_TRUE(standardize(r.F2(i, j) - expected, r.p).is_zero()) << what;
        }
}

}  // namespace

TEST(RegularSingular, GaugeToConstantTerm) {
    std::mt19937 rng(50);
    const Rational n(10);
    for (int it = 0; it < 12; ++it) {
        const std::size_t d = static_cast<std::size_t>(uniform(rng, 1, 3));
        AlgMatrix a0 = random_triangular(rng, d, {1, -1, 3, 5, -3});
        SeriesMatrix a = as_series(a0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) = a(i, j) + random_poly(rng, 3).shift(Rational(1));
        SeriesMatrix g = reduce_regular_singular(a, 2, n);
        EXPECT_TRUE(all_zero(truncate(sigma(g, 1, 2) * a - as_series(a0) * g, n)));
        EXPECT_FALSE(leibniz_det(g).is_zero());
    }
}

TEST(Sylvester, PositiveExponents) {
    std::mt19937 rng(51);
    const Rational n(12);
    for (int it = 0; it < 30; ++it) {
        const long p = uniform(rng, 2, 3);
        const std::size_t r = static_cast<std::size_t>(uniform(rng, 1, 2)), s = static_cast<std::size_t>(uniform(rng, 1, 2));
        AlgMatrix c1 = random_triangular(rng, r, {1, -1, 2, 3}), c2 = random_triangular(rng, s, {1, -1, 2, 3});
        SeriesMatrix b(r, s);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) b(i, j) = random_poly(rng, 4).shift(Rational(1));
        SeriesMatrix m = solve_positive_sylvester(c1, c2, b, p, n);
        EXPECT_TRUE(all_zero(truncate(as_series(c1) * m - sigma(m, 1, p) * as_series(c2) - b, n)));
    }
}

TEST(Sylvester, XiRightHandSide) {
    std::mt19937 rng(52);
    const Rational lower(-3);
    for (int it = 0; it < 15; ++it) {
        const long p = uniform(rng, 2, 3);
        const std::size_t r = static_cast<std::size_t>(uniform(rng, 1, 2)), s = static_cast<std::size_t>(uniform(rng, 1, 2));
        AlgMatrix c1 = random_triangular(rng, r, {1, -1, 2, 3}), c2 = random_triangular(rng, s, {1, -1, 2, 3});
        XiMatrix b = xi_zero_matrix(r, s);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j)
                b(i, j) = uniform(rng, 0, 1) ? XiExpr::xi(random_xi_index(rng, 1), Puiseux(Alg(uniform(rng, 1, 3))))
                                             : XiExpr(Puiseux(Alg(uniform(rng, -3, 3))) * z(-uniform(rng, 1, 2)));
        XiMatrix f = solve_xi_sylvester(c1, c2, b, p);
        // Exact: sigma(F) C2 - C1 F - B standardizes to zero.
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) {
                XiExpr res = -b(i, j);
                for (std::size_t k = 0; k < s; ++k) res.add(Puiseux(c2(k, j)) * sigma(f(i, k), 1, p));
                for (std::size_t k = 0; k < r; ++k) res.add(Puiseux(-c1(i, k)) * f(k, j));
                EXPECT_TRUE(standardize(res, p).is_zero()) << res.to_string();
                // Independent window check of the same identity.
                Window lhs, rhs = hahn_window(b(i, j), p, lower, 12);
                for (std::size_t k = 0; k < s; ++k)
                    for (const auto& [e, c] : window_scale(hahn_window(f(i, k), p, lower, 12), Rational(p)))
                        if (e >= lower) window_add(lhs, e, c2(k, j) * c);
                for (std::size_t k = 0; k < r; ++k)
                    for (const auto& [e, c] : hahn_window(f(k, j), p, lower, 12)) window_add(lhs, e, -c1(i, k) * c);
                WindowMatch m = windows_match(lhs, rhs, p, lower, Rational(0), 6);
                EXPECT_TRUE(m.equal) << m.detail;
                if (!b(i, j).is_zero()) EXPECT_GT(m.compared, 0u);
            }
    }
}

TEST(Reduction, RudinShapiro) {
    ReductionResult r = reduce_to_constant(rudin_shapiro_operator(), Rational(12));
    expect_valid_reduction(r, "RS");
    AlgMatrix c{{Alg(1), Alg(-1)}, {Alg(0), Alg(make_rational(-1, 2))}};
    EXPECT_EQ(r.C, c);
    EXPECT_EQ(standardize(r.F2(0, 1), 2), XiExpr::xi(rudin_shapiro_xi_index()));
}

TEST(Reduction, NonMinimal) {
    ReductionResult r = reduce_to_constant(non_minimal_operator(), Rational(12));
    expect_valid_reduction(r, "non-minimal");
}

TEST(Reduction, RandomOperatorsAndSystems) {
    std::mt19937 rng(53);
    for (int it = 0; it < 10; ++it) {
        const long p = uniform(rng, 2, 3);
        MahlerOperator l = random_operator(rng, p, 2);
        try {
            expect_valid_reduction(reduce_to_constant(l, Rational(10)), l.to_string());
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::UnsupportedSplitting) << e.what();
        }
        MahlerSystem a = random_system(rng, p, static_cast<int>(uniform(rng, 1, 3)), 2);
        try {
            expect_valid_reduction(reduce_to_constant(a, Rational(10)), "system");
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::UnsupportedSplitting) << e.what();
        }
    }
}

// A corrupted gauge must be rejected.
TEST(Reduction, CorruptedGaugeIsDetected) {
    ReductionResult r = reduce_to_constant(rudin_shapiro_operator(), Rational(12));
    XiMatrix bad = r.F2;
    bad(0, 1).add(XiExpr(z(-1)));
    EXPECT_FALSE(verify_gauge(r.system, xi_matmul(r.F1, bad), r.C).zero);
    AlgMatrix c = r.C;
    c(0, 0) = Alg(2);
    EXPECT_FALSE(verify_gauge(r.system, xi_matmul(r.F1, r.F2), c).zero);
}

TEST(Solutions, SatisfyTheEquation) {
    for (const auto& l : {rudin_shapiro_operator(), non_minimal_operator()}) {
        auto basis = solution_basis(l, Rational(12));
        EXPECT_EQ(basis.size(), static_cast<std::size_t>(l.order()));
        for (const auto& g : basis) {
            EXPECT_FALSE(g.is_zero());
            EXPECT_TRUE(standardize(apply_operator(l, g), l.p()).is_zero()) << g.to_string();
        }
    }
}

TEST(Solutions, NonMinimalContainsOne) {
    auto basis = solution_basis(non_minimal_operator(), Rational(10));
    bool found = false;
    for (const auto& g : basis) {
        if (g.terms().size() != 1) continue;
        const XiExpr x = g.part(Alg(1), 0);
        found = found || (x.terms().size() == 1 && x.terms().begin()->first.empty() &&
                          x.terms().begin()->second.agrees_with(Puiseux(1)));
    }
    EXPECT_TRUE(found);
}
