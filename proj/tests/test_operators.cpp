#include <gtest/gtest.h>

#include "mahler/examples.hpp"
#include "mahler/io.hpp"
#include "mahler/reduction.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace mahler;
using namespace mahler::testing;

namespace {

// Coefficients agree below n after clearing the leading-coefficient unit.
bool operators_agree_to(const MahlerOperator& a, const MahlerOperator& b, const Rational& n) {
    if (a.order() != b.order()) return false;
    for (int i = 0; i <= a.order(); ++i)
        if (!a.coeff(i).truncated(n).agrees_with(b.coeff(i).truncated(n))) return false;
    return true;
}

}  // namespace

TEST(Newton, RudinShapiroPolygon) {
    NewtonData d = newton_polygon(rudin_shapiro_operator());
    ASSERT_EQ(d.vertices.size(), 3u);
    EXPECT_EQ(d.vertices[2], std::make_pair(Rational(4), Rational(1)));
    ASSERT_EQ(d.edges.size(), 2u);
    EXPECT_EQ(d.edges[0].slope, Rational(0));
    EXPECT_EQ(d.edges[1].slope, make_rational(1, 2));
    EXPECT_EQ(d.edges[0].exponents, std::vector<Alg>{Alg(1)});
    EXPECT_EQ(d.edges[1].exponents, std::vector<Alg>{Alg(make_rational(-1, 2))});
}

TEST(Newton, NonMinimalPolygon) {
    NewtonData d = newton_polygon(non_minimal_operator());
    ASSERT_EQ(d.edges.size(), 2u);
    EXPECT_EQ(d.edges[0].slope, Rational(0));
    EXPECT_EQ(d.edges[1].slope, Rational(1));
    for (const auto& e : d.edges) EXPECT_EQ(e.multiplicity, 1);
}

TEST(Operators, ParseTextRoundTrip) {
    std::mt19937 rng(8);
    for (int it = 0; it < 30; ++it) {
        MahlerOperator l = random_operator(rng, uniform(rng, 2, 4));
        EXPECT_EQ(parse_operator(l.to_string()).to_string(), l.to_string());
        EXPECT_EQ(operator_from_json(to_json(l)).to_string(), l.to_string());
    }
    MahlerOperator nm = parse_operator(
        "(1-2*z) + (-1+2*z-z^2+3*z^3-3*z^4)*M + (z^2-3*z^3+3*z^4)*M^2 @ p=2");
    EXPECT_EQ(nm.to_string(), non_minimal_operator().to_string());
    // Products compose: M z = z^p M.
    EXPECT_EQ(parse_operator("M*z @ p=3").to_string(), "(z^3)*M @ p=3");
    EXPECT_THROW(parse_operator("1 + M"), Error);
    EXPECT_THROW(parse_operator("1 + M @ p=1"), Error);
    EXPECT_THROW(parse_operator("1 + xi[(0);(1);(1)]*M @ p=2"), Error);
}

TEST(Operators, ApplyToRudinShapiroSeries) {
    Puiseux f = rudin_shapiro_series(Rational(200));
    Puiseux r = rudin_shapiro_operator().apply(f);
    EXPECT_TRUE(r.is_zero());
    // The coefficients are +-1.
    for (const auto& [e, c] : f.terms()) EXPECT_TRUE(c == Alg(1) || c == Alg(-1));
    EXPECT_EQ(f.terms().size(), 200u);
}

TEST(Companion, RudinShapiroSystem) {
    MahlerSystem a = equation_to_companion(rudin_shapiro_operator());
    SeriesMatrix s = a.series(Rational(6));
    EXPECT_TRUE(s(0, 0).is_zero());
    EXPECT_EQ(s(0, 1).coeff(Rational(0)), Alg(1));
    // 1/(2z) and (z - 1)/(2z)
    EXPECT_TRUE((s(1, 0) - Alg(make_rational(1, 2)) * z(-1)).is_zero());
    EXPECT_TRUE((s(1, 1) - Alg(make_rational(1, 2)) * (Puiseux(1) - z(-1))).is_zero());
    // (f, f(z^2)) solves the system.
    Puiseux f = rudin_shapiro_series(Rational(64));
    for (int i = 0; i < 2; ++i) {
        Puiseux lhs = f.sigma(i + 1, 2);
        Puiseux rhs = s(static_cast<std::size_t>(i), 0) * f + s(static_cast<std::size_t>(i), 1) * f.sigma(1, 2);
        EXPECT_TRUE(lhs.truncated(Rational(5)).agrees_with(rhs.truncated(Rational(5))));
    }
}

TEST(Property, GaugeGroupActionLaws) {
    PropertyOutcome r = gauge_action_laws(21, 15);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Operators, RightDivisionConstantCase) {
    MahlerOperator a(2, {Puiseux(2), Puiseux(-3), Puiseux(1)}), b(2, {Puiseux(-2), Puiseux(1)});
    DivisionResult dr = right_divide(a, b, Rational(10));
    EXPECT_EQ(dr.quotient.to_string(), MahlerOperator(2, {Puiseux(-1), Puiseux(1)}).to_string());
    EXPECT_TRUE(dr.remainder.is_zero() || (dr.remainder.order() == 0 && dr.remainder.coeff(0).is_zero()));
}

TEST(Operators, RightDivisionReMultiplies) {
    std::mt19937 rng(9);
    for (int it = 0; it < 20; ++it) {
        const long p = uniform(rng, 2, 3);
        MahlerOperator l = random_operator(rng, p, 3);
        MahlerOperator m(p, {random_poly(rng, 2, 2, true), Puiseux(1) + random_poly(rng, 1, 1).shift(Rational(1))});
        if (l.order() < m.order()) continue;
        const Rational n(10);
        DivisionResult dr = right_divide(l, m, n);
        MahlerOperator back = dr.quotient * m + dr.remainder;
        EXPECT_LT(dr.remainder.order(), m.order());
        EXPECT_TRUE(operators_agree_to(back, l, Rational(6))) << l.to_string();
    }
}

TEST(Factorization, RudinShapiroFactors) {
    Factorization f = factor_by_slopes(rudin_shapiro_operator(), Rational(12));
    ASSERT_EQ(f.factors.size(), 2u);
    EXPECT_EQ(f.factors[0].c, Alg(1));
    EXPECT_EQ(f.factors[0].nu, Rational(0));
    EXPECT_EQ(f.factors[1].c, Alg(make_rational(-1, 2)));
    EXPECT_EQ(f.factors[1].nu, Rational(1));
    EXPECT_GE(f.achieved_precision, Rational(12));
}

// a L_s ... L_1 = L to the requested precision, val a = val a_0.
TEST(Factorization, ReMultiplicationOracle) {
    std::mt19937 rng(12);
    std::vector<MahlerOperator> cases{rudin_shapiro_operator(), non_minimal_operator()};
    for (int it = 0; it < 10; ++it) cases.push_back(random_operator(rng, uniform(rng, 2, 3), 3));
    for (const auto& l : cases) {
        const Rational n(10);
        Factorization f;
        try {
            f = factor_by_slopes(l, n);
        } catch (const Error& e) {
            ASSERT_EQ(e.kind(), ErrorKind::UnsupportedSplitting) << e.what();
            continue;
        }
        MahlerOperator prod(l.p(), {f.unit});
        for (std::size_t i = f.factors.size(); i-- > 0;) prod = prod * f.factors[i].as_operator(Rational(30));
        MahlerOperator le = l;
        if (f.field) {
            std::vector<Puiseux> cs;
            for (const auto& c : l.coeffs()) {
                Puiseux::Terms t;
                for (const auto& [e, x] : c.terms()) t.emplace(e, embed(x, f.generator_image));
                cs.push_back(Puiseux::from_terms(std::move(t)));
            }
            le = MahlerOperator(l.p(), std::move(cs));
        }
        EXPECT_TRUE(operators_agree_to(prod, le, Rational(4))) << l.to_string();
        EXPECT_EQ(f.unit.valuation(), l.coeff(0).valuation());
    }
}

TEST(Factorization, ConstantCoefficientProduct) {
    MahlerOperator l = MahlerOperator(2, {Puiseux(-1), Puiseux(1)}) * MahlerOperator(2, {Puiseux(-2), Puiseux(1)});
    Factorization f = factor_by_slopes(l, Rational(8));
    ASSERT_EQ(f.factors.size(), 2u);
    // cld(a) = prod(-c)^-1 cld(a_0)
    Alg expected = l.coeff(0).leading_coefficient();
    for (const auto& x : f.factors) expected /= -x.c;
    EXPECT_EQ(f.unit.leading_coefficient(), expected);
}

TEST(Guessing, RecoversRudinShapiro) {
    auto g = guess_minimal_operator(rudin_shapiro_series(Rational(60)), 2, 3, 4);
    ASSERT_TRUE(g.has_value());
    EXPECT_TRUE(g->op.same_up_to_unit(rudin_shapiro_operator()));
    EXPECT_EQ(g->order, 2);
}

TEST(Guessing, ConstantAndNoRelation) {
    auto one = guess_minimal_operator(Puiseux(1) + Puiseux::big_o(Rational(20)), 2, 2, 2);
    ASSERT_TRUE(one.has_value());
    EXPECT_EQ(one->order, 1);
    // Random +-1 coefficients: no relation of small size.
    std::mt19937 rng(2);
    Puiseux::Terms t;
    for (int k = 0; k < 40; ++k) t.emplace(Rational(k), Alg(uniform(rng, 0, 1) ? 1 : -1));
    auto none = guess_minimal_operator(Puiseux::from_terms(t, Rational(40)), 2, 2, 2);
    EXPECT_FALSE(none.has_value());
}

TEST(Cyclic, CompanionGivesBackTheOperator) {
    MahlerSystem a = equation_to_companion(rudin_shapiro_operator());
    CyclicResult c = system_to_operator(a);
    EXPECT_TRUE(c.op.same_up_to_unit(rudin_shapiro_operator())) << c.op.to_string();
}

TEST(Pullback, OperatorSubstitution) {
    MahlerOperator l = rudin_shapiro_operator();
    MahlerOperator l2 = substitute(l, Rational(3));
    Puiseux f = rudin_shapiro_series(Rational(40)).substitute(Rational(3));
    EXPECT_TRUE(l2.apply(f).is_zero());
}
