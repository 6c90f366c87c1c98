#include "mahler/examples.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include "mahler/growth.hpp"
#include "mahler/linalg.hpp"
#include "mahler/reduction.hpp"

namespace mahler {

MahlerOperator rudin_shapiro_operator() {
    const Puiseux z = Puiseux::z();
    return MahlerOperator(2, {Puiseux(1), z - Puiseux(1), Puiseux(-2) * z});
}

Puiseux rudin_shapiro_series(const Rational& n) {
    require(n > 0, ErrorKind::InvalidArgument, "series precision must be positive");
    const Puiseux z = Puiseux::z();
    Puiseux f = Puiseux(1) + Puiseux::big_o(Rational(1));
    // y = (1 - z) y(z^2) + 2z y(z^4) doubles the known range at every step.
    while (*f.precision() < n) f = (Puiseux(1) - z) * f.sigma(1, 2) + Puiseux(2) * z * f.sigma(2, 2);
    return f.truncated(n);
}

MahlerOperator non_minimal_operator() {
    const Puiseux z = Puiseux::z();
    auto zp = [&](long k) { return Puiseux::z(Rational(k)); };
    return MahlerOperator(2, {Puiseux(1) - Puiseux(2) * z,
                              Puiseux(-1) + Puiseux(2) * z - zp(2) + Puiseux(3) * zp(3) - Puiseux(3) * zp(4),
                              zp(2) - Puiseux(3) * zp(3) + Puiseux(3) * zp(4)});
}

Puiseux laurent_example_prefix() {
    Puiseux::Terms t{{Rational(-1), Alg(-1)}};
    const long c[] = {3, 6, 6, 21, 21, 60, 99, 234};
    for (long k = 1; k <= 8; ++k) t.emplace(Rational(k), Alg(c[k - 1]));
    return Puiseux::from_terms(std::move(t));
}

XiIndex rudin_shapiro_xi_index() { return XiIndex({0}, {Alg(-2)}, {Rational(1)}); }

bool series_in_span(const Puiseux& target, const std::vector<Puiseux>& span, const Rational& upto) {
    std::vector<Rational> exps;
    auto collect = [&](const Puiseux& f) {
        require(f.is_exact() || *f.precision() >= upto, ErrorKind::PrecisionLoss,
                "series not known far enough for the span test");
        for (const auto& [e, c] : f.terms())
            if (e < upto) exps.push_back(e);
    };
    collect(target);
    for (const auto& s : span) collect(s);
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
    AlgMatrix m(exps.size(), span.size() + 1);
    for (std::size_t i = 0; i < exps.size(); ++i) {
        for (std::size_t j = 0; j < span.size(); ++j)
            m(i, j) = span[j].terms().count(exps[i]) ? span[j].terms().at(exps[i]) : Alg(0);
        m(i, span.size()) = target.terms().count(exps[i]) ? target.terms().at(exps[i]) : Alg(0);
    }
    AlgMatrix ker = nullspace(m);
    for (std::size_t k = 0; k < ker.cols(); ++k)
        if (!ker(span.size(), k).is_zero()) return true;
    return false;
}

// Plain series parts (c = 1, j = 0, no xi terms) of a basis.
std::vector<Puiseux> plain_parts(const std::vector<GeneralizedSeries>& basis) {
    std::vector<Puiseux> out;
    for (const auto& b : basis) {
        if (b.terms().size() != 1) continue;
        const auto& [key, x] = *b.terms().begin();
        if (!key.c.is_one() || key.j != 0 || x.terms().size() != 1 || !x.terms().begin()->first.empty()) continue;
        out.push_back(x.terms().begin()->second);
    }
    return out;
}

// The correction series g of the Rudin-Shapiro exponent -1/2 solution,
// normalized so the element reads (f_RS / 2) xi + g.
Puiseux rudin_shapiro_correction(const std::vector<GeneralizedSeries>& basis) {
    const XiIndex w = rudin_shapiro_xi_index();
    for (const auto& b : basis) {
        XiExpr x = b.part(Alg(make_rational(-1, 2)), 0);
        if (x.is_exact_zero()) continue;
        Puiseux fx = x.coefficient(w);
        require(!fx.is_zero(), ErrorKind::InvalidArgument, "exponent -1/2 solution without the expected xi term");
        Alg scale = Alg(make_rational(1, 2)) / fx.coeff(Rational(0));
        return scale * x.coefficient(XiIndex());
    }
    raise(ErrorKind::InvalidArgument, "no solution with exponent -1/2");
}

namespace {

RegressionCheck timed(const std::string& name, const std::function<bool(std::string&)>& body) {
    RegressionCheck c;
    c.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
        c.passed = body(c.detail);
    } catch (const Error& e) {
        c.passed = false;
        c.detail = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

}  // namespace

std::vector<RegressionCheck> run_regression_pack() {
    std::vector<RegressionCheck> out;
    const MahlerOperator rs = rudin_shapiro_operator();
    const MahlerOperator nm = non_minimal_operator();

    out.push_back(timed("non-minimal: span holds 1 and the Laurent solution", [&](std::string& d) {
        auto parts = plain_parts(solution_basis(nm, Rational(10)));
        d = std::to_string(parts.size()) + " plain series solutions";
        return series_in_span(Puiseux(1), parts, Rational(9)) &&
               series_in_span(laurent_example_prefix(), parts, Rational(9));
    }));

    out.push_back(timed("Rudin-Shapiro: exponents {1, -1/2}", [&](std::string& d) {
        std::vector<Alg> ex;
        for (const auto& e : newton_polygon(rs).edges) ex.insert(ex.end(), e.exponents.begin(), e.exponents.end());
        std::sort(ex.begin(), ex.end());
        for (const auto& c : ex) d += (d.empty() ? "" : ", ") + c.to_string();
        return ex == std::vector<Alg>{Alg(make_rational(-1, 2)), Alg(1)};
    }));

    out.push_back(timed("Rudin-Shapiro: xi(z^2) = -2 xi - 2 z^-1", [&](std::string& d) {
        const XiIndex w = rudin_shapiro_xi_index();
        XiExpr lhs = standardize(xi_shift(w, 1, 2), 2);
        XiExpr rhs = XiExpr::xi(w, Puiseux(-2)) + XiExpr(Puiseux::monomial(Alg(-2), Rational(-1)));
        d = lhs.to_string();
        return lhs == rhs;
    }));

    out.push_back(timed("Rudin-Shapiro: g0 = 1/3, g1 = 5/6", [&](std::string& d) {
        Puiseux g = rudin_shapiro_correction(solution_basis(rs, Rational(12)));
        d = "g0 = " + g.coeff(Rational(0)).to_string() + ", g1 = " + g.coeff(Rational(1)).to_string();
        return g.coeff(Rational(0)) == Alg(make_rational(1, 3)) && g.coeff(Rational(1)) == Alg(make_rational(5, 6));
    }));

    out.push_back(timed("Rudin-Shapiro: 2-adic size of g_(2^n) is n+1, n = 1..10", [&](std::string& d) {
        Puiseux g = rudin_shapiro_correction(solution_basis(rs, Rational(1030)));
        bool ok = true;
        for (long n = 1; n <= 10; ++n) {
            Alg c = g.coeff(Rational(1L << n));
            long v = c.is_zero() ? 0 : -padic_valuation(c.rational(), 2);
            if (v != n + 1) {
                ok = false;
                d = "n = " + std::to_string(n) + ": got " + std::to_string(v);
            }
        }
        if (ok) d = "denominators 2^(n+1) * odd";
        return ok;
    }));

    out.push_back(timed("standardize xi[(0);(1);(p)] = z^-1 + xi[(0);(1);(1)]", [&](std::string& d) {
        bool ok = true;
        for (long p : {2L, 3L, 5L}) {
            XiExpr lhs = standardize(XiIndex({0}, {Alg(1)}, {Rational(p)}), p);
            XiExpr rhs = XiExpr::xi(XiIndex({0}, {Alg(1)}, {Rational(1)})) +
                         XiExpr(Puiseux::monomial(Alg(1), Rational(-1)));
            if (!(lhs == rhs)) {
                ok = false;
                d = "p = " + std::to_string(p) + ": " + lhs.to_string();
            }
        }
        return ok;
    }));

    out.push_back(timed("guessing: Rudin-Shapiro from 60 coefficients", [&](std::string& d) {
        auto g = guess_minimal_operator(rudin_shapiro_series(Rational(60)), 2, 3, 4);
        if (!g) return false;
        d = g->op.to_string();
        return g->op.same_up_to_unit(rs);
    }));

    out.push_back(timed("guessing: non-minimal operator from 40 Laurent terms", [&](std::string& d) {
        auto parts = plain_parts(solution_basis(nm, Rational(40)));
        for (const auto& s : parts) {
            if (s.is_zero() || s.valuation() != -1) continue;
            auto g = guess_minimal_operator(s.truncated(Rational(39)), 2, 3, 4);
            if (!g) return false;
            d = g->op.to_string();
            return g->order == 2 && g->op.same_up_to_unit(nm);
        }
        d = "no Laurent solution found";
        return false;
    }));

    out.push_back(timed("purity: f_RS is C5; classes agree at r = 3, differ at r = 4, 5", [&](std::string& d) {
        auto f = GeneralizedSeries::single(Alg(1), 0, XiExpr(rudin_shapiro_series(Rational(1030))));
        PurityReport rep = purity_report(f, 2);
        d = "input " + to_string(rep.input_class.label) + ", basis";
        for (const auto& c : rep.basis_classes) d += " " + to_string(c.label);
        return rep.input_class.label == GrowthLabel::C5 && rep.agree[3] && !rep.agree[4] && !rep.agree[5];
    }));

    out.push_back(timed("purity: non-minimal operator flagged for the constant solution", [&](std::string& d) {
        auto parts = plain_parts(solution_basis(nm, Rational(300)));
        for (const auto& s : parts) {
            if (s.is_zero() || s.valuation() != -1) continue;
            PurityOptions opt;
            opt.precision = Rational(300);
            PurityReport rep = purity_report(GeneralizedSeries::single(Alg(1), 0, XiExpr(s)), 2, opt, nm);
            for (const auto& w : rep.warnings)
                if (w.find("not minimal") != std::string::npos) {
                    d = w;
                    return true;
                }
            d = "no warning emitted";
            return false;
        }
        d = "no Laurent solution found";
        return false;
    }));
    return out;
}

}  // namespace mahler
