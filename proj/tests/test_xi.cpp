#include <gtest/gtest.h>

#include "mahler/examples.hpp"
#include "mahler/io.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace mahler;
using namespace mahler::testing;

namespace {

constexpr int kDepth = 12;
constexpr long kMaxDepth = 6;
// Products merge up to six index entries; carries between them can lower the
// p-power of a deep term's denominator by up to about a dozen, so the factors
// are expanded deeper, the grid is coarser and the product side is evaluated
// exactly.
constexpr int kProductDepth = 16;
constexpr long kProductMaxDepth = 4;

XiIndex basic_index(long a = 1) { return XiIndex({0}, {Alg(1)}, {Rational(a)}); }

// c z^-g xi_w with g in {0, 1}.
XiExpr random_term(std::mt19937& rng, int max_len = 3) {
    Puiseux coef = Puiseux(Alg(uniform(rng, 1, 3) * (uniform(rng, 0, 1) ? 1 : -1))) * z(-uniform(rng, 0, 1));
    return XiExpr::xi(random_xi_index(rng, max_len), coef);
}

XiExpr random_expr(std::mt19937& rng, int max_terms = 3) {
    XiExpr x;
    const long n = uniform(rng, 1, max_terms);
    for (long i = 0; i < n; ++i) x.add(random_term(rng));
    return x;
}

void expect_window_equal(const Window& lhs, const XiExpr& rhs, long p, const Rational& lower,
                         const std::string& what) {
    Window w = hahn_window(rhs, p, lower, kDepth);
    WindowMatch m = windows_match(lhs, w, p, lower, Rational(0), kMaxDepth);
    EXPECT_TRUE(m.equal) << what << ": " << m.detail;
    EXPECT_GT(m.compared, 0u) << what;
}

}  // namespace

TEST(XiExpand, BasicIndexWindow) {
    TruncatedHahn h = xi_expand(basic_index(), make_rational(-1, 16), 2, Rational(-1));
    ASSERT_EQ(h.terms.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(h.terms[k].first, -Rational(1) / Rational(2L << k));
        EXPECT_EQ(h.terms[k].second, Alg(1));
    }
    EXPECT_TRUE(h.complete);
}

TEST(XiExpand, RudinShapiroIndex) {
    TruncatedHahn h = xi_expand(rudin_shapiro_xi_index(), make_rational(-1, 1024), 2, Rational(-1));
    ASSERT_EQ(h.terms.size(), 10u);
    Alg c(1);
    for (std::size_t k = 0; k < 10; ++k) {
        c *= Alg(-2);
        EXPECT_EQ(h.terms[k].second, c);
    }
}

TEST(XiCoefficient, AgreesWithExpansion) {
    std::mt19937 rng(31);
    for (int it = 0; it < 20; ++it) {
        const long p = uniform(rng, 2, 3);
        XiIndex w = random_xi_index(rng, 2);
        TruncatedHahn h = xi_expand(w, make_rational(-1, 200), p, Rational(-3), 10);
        for (const auto& [e, c] : h.terms)
            if (p_depth(e, p) <= 4) EXPECT_EQ(xi_coefficient(w, e, p), c) << w.to_string();
    }
}

TEST(XiShift, RudinShapiroRelation) {
    // xi(z^2) = -2 xi - 2 z^-1
    XiExpr s = xi_shift(rudin_shapiro_xi_index(), 1, 2);
    XiExpr expected = XiExpr::xi(rudin_shapiro_xi_index(), Puiseux(-2)) + XiExpr(Puiseux(-2) * z(-1));
    EXPECT_EQ(standardize(s, 2), expected) << s.to_string();
}

TEST(XiShift, MatchesWindowOracle) {
    std::mt19937 rng(32);
    for (int it = 0; it < 30; ++it) {
        const long p = uniform(rng, 2, 3);
        const long j = uniform(rng, -2, 2);
        XiIndex w = random_xi_index(rng);
        const Rational lower(-3);
        Rational factor(1);
        for (long k = 0; k < std::abs(j); ++k) factor *= Rational(p);
        if (j < 0) factor = Rational(1) / factor;
        Window base = hahn_window(XiExpr::xi(w), p, Rational(lower / factor), kDepth);
        expect_window_equal(window_scale(base, factor), xi_shift(w, j, p), p, lower,
                            w.to_string() + " j=" + std::to_string(j));
    }
}

// The oracle must notice a wrong shift.
TEST(XiShift, OracleDetectsMismatch) {
    const XiIndex w = rudin_shapiro_xi_index();
    Window base = hahn_window(XiExpr::xi(w), 2, Rational(-3), kDepth);
    Window wrong = hahn_window(xi_shift(w, 2, 2), 2, Rational(-3), kDepth);
    WindowMatch m = windows_match(window_scale(base, Rational(2)), wrong, 2, Rational(-3), Rational(0), kMaxDepth);
    EXPECT_FALSE(m.equal);
}

TEST(XiMultiply, MatchesWindowOracle) {
    std::mt19937 rng(33);
    for (int it = 0; it < 25; ++it) {
        const long p = uniform(rng, 2, 3);
        XiExpr x = random_term(rng, 2), y = random_term(rng, 2);
        const Rational lower(-3);
        Window lhs = window_product(hahn_window(x, p, lower, kProductDepth), hahn_window(y, p, lower, kProductDepth),
                                    lower);
        WindowMatch m = window_matches_exact(lhs, xi_multiply(x, y, p), p, lower, Rational(0), kProductMaxDepth);
        EXPECT_TRUE(m.equal) << x.to_string() << " * " << y.to_string() << ": " << m.detail;
        EXPECT_GT(m.compared, 0u);
    }
}

TEST(XiSigmaInverseSum, MatchesWindowOracle) {
    std::mt19937 rng(34);
    for (int it = 0; it < 25; ++it) {
        const long p = uniform(rng, 2, 3);
        const int alpha = static_cast<int>(uniform(rng, 0, 2));
        const Alg c(uniform(rng, 0, 1) ? 1 : -2);
        XiExpr h = random_term(rng, 2);
        if (uniform(rng, 0, 2) == 0) h = XiExpr(Puiseux(Alg(uniform(rng, 1, 3))) * z(-uniform(rng, 1, 2)));
        const Rational lower(-3);
        Window base = hahn_window(h, p, window_floor(h), kDepth);
        Window lhs;
        Rational scale(1);
        Alg ck(1);
        for (long k = 1; k <= kDepth; ++k) {
            scale /= Rational(p);
            ck *= c;
            Alg weight = ck;
            for (int a = 0; a < alpha; ++a) weight *= Alg(k);
            for (const auto& [e, v] : base)
                if (e * scale >= lower) window_add(lhs, e * scale, weight * v);
        }
        expect_window_equal(lhs, xi_sigma_inverse_sum(alpha, c, h, p), p, lower, h.to_string());
    }
}

TEST(Standardize, BasicIdentity) {
    for (long p : {2L, 3L, 5L}) {
        XiExpr s = standardize(basic_index(p), p);
        EXPECT_EQ(s, XiExpr(z(-1)) + XiExpr::xi(basic_index())) << s.to_string();
        EXPECT_TRUE(s.is_standard(p));
    }
}

TEST(Standardize, IdempotentAndWindowPreserving) {
    std::mt19937 rng(35);
    for (int it = 0; it < 40; ++it) {
        const long p = uniform(rng, 2, 3);
        XiExpr x = random_expr(rng);
        XiExpr s = standardize(x, p);
        EXPECT_TRUE(s.is_standard(p)) << s.to_string();
        EXPECT_EQ(standardize(s, p), s);
        const Rational lower(-3);
        expect_window_equal(hahn_window(x, p, lower, kDepth), s, p, lower, x.to_string());
    }
}

TEST(Annihilator, KillsTheSeries) {
    std::mt19937 rng(36);
    std::vector<XiIndex> cases{basic_index(), rudin_shapiro_xi_index()};
    for (int it = 0; it < 6; ++it) cases.push_back(random_xi_index(rng, 2));
    for (const auto& w : cases)
        for (long p : {2L, 3L}) {
            MahlerOperator l = xi_annihilator(w, p);
            EXPECT_TRUE(standardize(apply_operator(l, XiExpr::xi(w)), p).is_zero()) << w.to_string();
        }
}

TEST(XiIo, CompactRoundTrip) {
    std::mt19937 rng(37);
    for (int it = 0; it < 30; ++it) {
        XiExpr x = random_expr(rng);
        EXPECT_EQ(parse_xi_expr(to_compact_string(x)), x) << to_compact_string(x);
        EXPECT_EQ(xi_expr_from_json(to_json(x)), x);
    }
    EXPECT_EQ(parse_xi_index("xi[alpha=(0,1); lambda=(1,-2); a=(1,1/3)]"),
              XiIndex({0, 1}, {Alg(1), Alg(-2)}, {Rational(1), make_rational(1, 3)}));
    EXPECT_THROW(parse_xi_expr("xi[(0);(1)]"), Error);
}

TEST(Property, FiltrationDegreeBounds) {
    PropertyOutcome r = filtration_degree_bounds(38, 25);
    EXPECT_TRUE(r.ok) << r.detail;
}
