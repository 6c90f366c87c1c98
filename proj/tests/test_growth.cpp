#include <gtest/gtest.h>

#include <cmath>

#include "mahler/examples.hpp"
#include "mahler/growth.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace mahler;
using namespace mahler::testing;

namespace {

// Heights h(gamma) = shape(log H) for gamma = 2..count.
std::vector<HeightSample> synthetic(long count, long double (*shape)(long double)) {
    std::vector<HeightSample> out;
    for (long k = 2; k <= count; ++k) {
        HeightSample s;
        s.gamma = Rational(k);
        s.log_H = std::log(static_cast<long double>(k));
        s.height = shape(s.log_H);
        out.push_back(s);
    }
    return out;
}

GeneralizedSeries plain(const Puiseux& f) { return GeneralizedSeries::single(Alg(1), 0, XiExpr(f)); }

}  // namespace

TEST(Growth, SyntheticShapes) {
    const long n = 4096;
    EXPECT_EQ(classify_empirical(synthetic(n, [](long double) { return 1.0L; })).label, GrowthLabel::C5);
    EXPECT_EQ(classify_empirical(synthetic(n, [](long double x) { return std::log(x) + 1; })).label,
              GrowthLabel::C4);
    EXPECT_EQ(classify_empirical(synthetic(n, [](long double x) { return x; })).label, GrowthLabel::C3);
    EXPECT_EQ(classify_empirical(synthetic(n, [](long double x) { return x * x; })).label, GrowthLabel::C2);
    EXPECT_EQ(classify_empirical(synthetic(n, [](long double x) { return std::exp(x); })).label, GrowthLabel::C1);
}

TEST(Growth, TooFewSamplesIsUnknown) {
    try {
        classify_empirical(synthetic(10, [](long double) { return 1.0L; }));
        ADD_FAILURE() << "expected InsufficientData";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(Growth, RudinShapiroSeriesIsBounded) {
    GrowthClass c = classify_series(plain(rudin_shapiro_series(Rational(1024))), 2, Rational(1024));
    EXPECT_EQ(c.label, GrowthLabel::C5) << c.evidence;
}

TEST(Growth, FiniteSupportIsC5) {
    GrowthClass c = classify_series(plain(Puiseux(1) + z(3)), 2, Rational(100));
    EXPECT_EQ(c.label, GrowthLabel::C5);
}

TEST(Denominators, RootsGiveCertifiedClasses) {
    auto label_for = [](const Puiseux& a0, long p) {
        return classify_by_roots(denominator_from_operator(MahlerOperator(p, {a0, Puiseux(1)})), p).label;
    };
    // a_0 = (1 - z)(1 - 2z): the root 1/2 is not a root of unity.
    DenominatorReport r = denominator_from_operator(
        MahlerOperator(2, {Puiseux(1) - Puiseux(3) * z() + Puiseux(2) * z(2), Puiseux(1)}));
    ASSERT_FALSE(r.zero_ideal);
    EXPECT_EQ(r.roots.size(), 2u);
    EXPECT_EQ(classify_by_roots(r, 2).label, GrowthLabel::C1);
    // Roots of unity, one of order prime to p: C2.
    EXPECT_EQ(label_for(Puiseux(1) - z(2), 2), GrowthLabel::C2);
    // Only roots of unity whose order shares a factor with p: C3.
    EXPECT_EQ(label_for(Puiseux(1) + z(), 2), GrowthLabel::C3);
    EXPECT_EQ(label_for(Puiseux(1) + z() + z(2), 3), GrowthLabel::C3);
    EXPECT_EQ(label_for(Puiseux(1) + z() + z(2), 2), GrowthLabel::C2);
}

TEST(Denominators, FractionalExponentsGiveZeroIdeal) {
    DenominatorReport r = mahler_denominator_candidate(zq(1, 2) + Puiseux::big_o(Rational(40)), 2);
    EXPECT_TRUE(r.zero_ideal);
}

TEST(Property, PullbackRoundTrips) {
    PropertyOutcome r = pullback_round_trips(60, 20);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Purity, SmallPrecisionReport) {
    PurityOptions opt;
    opt.precision = Rational(300);
    PurityReport rep = purity_report(plain(rudin_shapiro_series(Rational(300))), 2, opt, rudin_shapiro_operator());
    EXPECT_FALSE(rep.op_guessed);
    EXPECT_EQ(rep.basis.size(), 2u);
    EXPECT_EQ(rep.basis_classes.size(), rep.basis.size());
    EXPECT_TRUE(rep.agree[1]);
}
