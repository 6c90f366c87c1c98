#include <gtest/gtest.h>

#include <cmath>

#include "mahler/factor.hpp"
#include "mahler/linalg.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace mahler;
using namespace mahler::testing;

namespace {

QPoly qpoly(std::initializer_list<long> c) {
    std::vector<Rational> v;
    for (long x : c) v.emplace_back(x);
    return QPoly(std::move(v));
}

Alg sqrt2() { return Alg::generator(NumberField::create(qpoly({-2, 0, 1}), 1)); }
Alg cubic_root() { return Alg::generator(NumberField::create(qpoly({-1, -1, 0, 1}), 0)); }

Alg random_element(std::mt19937& rng, const Alg& gen, int degree) {
    Alg x(0), g(1);
    for (int k = 0; k < degree; ++k) {
        x += Alg(random_rational(rng, 5)) * g;
        g *= gen;
    }
    return x;
}

}  // namespace

TEST(Rational, ParseAndPrint) {
    EXPECT_EQ(parse_rational(" -3/6 "), make_rational(-1, 2));
    EXPECT_EQ(to_string(make_rational(4, 2)), "2");
    EXPECT_EQ(to_string(make_rational(-1, 3)), "-1/3");
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("x"), Error);
}

TEST(Rational, PadicValuation) {
    EXPECT_EQ(padic_valuation(make_rational(12, 5), 2), 2);
    EXPECT_EQ(padic_valuation(make_rational(5, 48), 2), -4);
    Rational eta;
    long u = 0;
    split_p_power(make_rational(18, 4), 3, eta, u);
    EXPECT_EQ(u, 2);
    EXPECT_EQ(eta, make_rational(1, 2));
}

TEST(Algebraic, QuadraticArithmetic) {
    Alg s = sqrt2();
    EXPECT_EQ(s * s, Alg(2));
    EXPECT_EQ((Alg(1) + s) * (Alg(-1) + s), Alg(1));
    EXPECT_EQ((Alg(1) + s).inverse(), Alg(-1) + s);
    EXPECT_NEAR(static_cast<double>(s.approx().real()), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(s.minimal_polynomial(), qpoly({-2, 0, 1}));
    EXPECT_EQ(s.norm(), Rational(-2));
    EXPECT_EQ(s.trace(), Rational(0));
}

TEST(Algebraic, FieldAxiomsOnRandomElements) {
    std::mt19937 rng(11);
    for (const Alg& gen : {sqrt2(), cubic_root()}) {
        const int deg = gen.degree();
        for (int it = 0; it < 30; ++it) {
            Alg x = random_element(rng, gen, deg), y = random_element(rng, gen, deg), w = random_element(rng, gen, deg);
            EXPECT_EQ(x * (y + w), x * y + x * w);
            EXPECT_EQ((x * y) * w, x * (y * w));
            if (!x.is_zero()) EXPECT_EQ(x * x.inverse(), Alg(1));
            // The minimal polynomial vanishes at x.
            QPoly mp = x.minimal_polynomial();
            EXPECT_TRUE(to_alg_poly(mp)(x).is_zero());
        }
    }
}

TEST(Algebraic, FromMinpolyMatchesRootOrder) {
    Alg a = Alg::from_minpoly({Integer(-2), Integer(0), Integer(1)}, 1);
    EXPECT_GT(a.approx().real(), 0);
    EXPECT_EQ(a * a, Alg(2));
    Alg b = Alg::from_minpoly({Integer(-2), Integer(0), Integer(1)}, 0);
    EXPECT_LT(b.approx().real(), 0);
}

TEST(Factor, RationalFactorizationReproducesInput) {
    QPoly f = qpoly({-2, 0, 1}) * qpoly({-2, 0, 1}) * qpoly({1, 0, 0, 0, 1}) * qpoly({-1, 1});
    auto fs = factor_rational(f);
    QPoly prod = QPoly::constant(Rational(1));
    for (const auto& [g, m] : fs) prod = prod * pow(g, m);
    EXPECT_EQ(prod, f.monic());
    ASSERT_EQ(fs.size(), 3u);
    for (const auto& [g, m] : fs)
        if (g.degree() == 2) EXPECT_EQ(m, 2);
}

TEST(Factor, SplittingFieldOfBiquadratic) {
    QPoly g = qpoly({-2, 0, 1}) * qpoly({-3, 0, 1});
    Splitting sp = split_polynomial(to_alg_poly(g));
    ASSERT_TRUE(sp.field);
    EXPECT_EQ(sp.field->degree(), 4);
    ASSERT_EQ(sp.roots.size(), 4u);
    for (const auto& r : sp.roots) EXPECT_TRUE(to_alg_poly(g)(r).is_zero());
}

TEST(Factor, SplittingRespectsBound) {
    // x^5 - x - 1 has Galois group S5: its splitting field has degree 120.
    EXPECT_THROW(split_polynomial(to_alg_poly(qpoly({-1, -1, 0, 0, 0, 1})), 12), Error);
}

TEST(Factor, RationalRootsNeedNoField) {
    Splitting sp = split_polynomial(to_alg_poly(qpoly({2, -3, 1})));
    EXPECT_FALSE(sp.field);
    ASSERT_EQ(sp.roots.size(), 2u);
    EXPECT_EQ(sp.roots[0], Alg(1));
    EXPECT_EQ(sp.roots[1], Alg(2));
}

TEST(RootsOfUnity, CyclotomicOrders) {
    for (long m : {3L, 4L, 5L, 6L, 8L, 12L}) {
        auto roots = roots_by_minpoly(cyclotomic(m));
        ASSERT_FALSE(roots.empty());
        for (const auto& r : roots) EXPECT_EQ(is_root_of_unity(r), m);
    }
    EXPECT_EQ(is_root_of_unity(Alg(-1)), 2);
    EXPECT_FALSE(is_root_of_unity(Alg(2)).has_value());
    EXPECT_FALSE(is_root_of_unity(sqrt2()).has_value());
}

TEST(Property, WeilHeightSubadditivity) {
    PropertyOutcome r = weil_height_subadditivity(5, 200);
    EXPECT_TRUE(r.ok) << r.detail;
    EXPECT_GT(r.cases, 600u);
}

TEST(WeilHeight, KnownValues) {
    EXPECT_EQ(weil_height(Rational(0)), 0);
    EXPECT_NEAR(static_cast<double>(weil_height(make_rational(-3, 7))), std::log(7.0), 1e-15);
    EXPECT_NEAR(static_cast<double>(weil_height(sqrt2())), std::log(2.0) / 2, 1e-12);
}

TEST(Property, DunfordExactness) {
    PropertyOutcome r = dunford_exactness(3, 25);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Linalg, EigenStructureOverExtension) {
    AlgMatrix m{{Alg(0), Alg(1)}, {Alg(1), Alg(1)}};
    EigenStructure e = eigen_structure(m);
    ASSERT_TRUE(e.field);
    EXPECT_EQ(e.field->degree(), 2);
    AlgMatrix me = embed(m, e.generator_image);
    AlgMatrix diag = e.P_inv * me * e.P;
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(diag(i, i), e.diagonal[i]);
        EXPECT_EQ(e.diagonal[i] * e.diagonal[i], e.diagonal[i] + Alg(1));
    }
    EXPECT_TRUE(diag(0, 1).is_zero());
}

TEST(Linalg, EigenStructureOverQuadraticBase) {
    // Entries in Q(sqrt 2) with a rational characteristic polynomial.
    const Alg s = sqrt2();
    AlgMatrix c{{s, Alg(1)}, {Alg(0), -s}};
    EigenStructure e = eigen_structure(c);
    ASSERT_EQ(e.diagonal.size(), 2u);
    EXPECT_EQ(e.diagonal[0] * e.diagonal[0], Alg(2));
}
