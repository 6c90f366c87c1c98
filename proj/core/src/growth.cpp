#include "mahler/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mahler/factor.hpp"
#include "mahler/linalg.hpp"

namespace mahler {

std::string to_string(GrowthLabel label) {
    switch (label) {
        case GrowthLabel::C1: return "C1";
        case GrowthLabel::C2: return "C2";
        case GrowthLabel::C3: return "C3";
        case GrowthLabel::C4: return "C4";
        case GrowthLabel::C5: return "C5";
        default: return "UNKNOWN";
    }
}

namespace {

long double log_height_of_exponent(const Rational& g) {
    if (sgn(g) == 0) return 0;
    Integer n = abs(g.get_num());
    const Integer& d = g.get_den();
    return weil_height(Rational(n > d ? n : d));
}

// Bound functions of the classes evaluated at log H.
long double bound_function(int r, long double log_h) {
    switch (r) {
        case 1: return std::exp(log_h);
        case 2: return log_h * log_h;
        case 3: return log_h;
        case 4: return log_h > 1 ? std::log(log_h) : 0;
        default: return 1;
    }
}

struct Fit {
    long double alpha = 0, beta = 0, rms = 0;
};

Fit least_squares(const std::vector<long double>& x, const std::vector<long double>& y) {
    Fit f;
    const std::size_t n = x.size();
    if (n < 2) return f;
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    long double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    f.beta = sxx > 0 ? sxy / sxx : 0;
    f.alpha = my - f.beta * mx;
    long double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double e = y[i] - f.alpha - f.beta * x[i];
        ss += e * e;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

long gcd_long(long a, long b) { return std::gcd(a, b); }

}  // namespace

// ---------------------------------------------------------------- heights

std::vector<HeightSample> coefficient_heights(const Puiseux& f, const Rational& lo, const Rational& hi) {
    const long kappa = f.ramification();
    std::vector<HeightSample> out;
    Rational start = lo;
    if (!f.terms().empty() && start < f.terms().begin()->first) start = f.terms().begin()->first;
    Integer first = ceil_of(start * kappa);
    for (Integer n = first;; ++n) {
        Rational g(n, kappa);
        g.canonicalize();
        if (!(g < hi) || !f.known(g)) break;
        HeightSample s;
        s.gamma = g;
        Alg c = f.coeff(g);
        s.height = c.is_zero() ? 0 : weil_height(c);
        s.log_H = log_height_of_exponent(g);
        out.push_back(s);
    }
    return out;
}

std::vector<LabelledHeights> coefficient_heights(const GeneralizedSeries& g, long p, const Rational& lo,
                                                 const Rational& hi) {
    std::vector<LabelledHeights> out;
    GeneralizedSeries s = standardize(g, p);
    for (const auto& [key, x] : s.terms())
        for (const auto& [w, f] : x.terms()) {
            LabelledHeights lh;
            lh.where = "[c=" + key.c.to_string() + ", j=" + std::to_string(key.j) + "] " +
                       (w.empty() ? std::string("1") : w.to_string());
            lh.finite = f.is_exact();
            Rational top = hi;
            if (f.precision() && *f.precision() < top) top = *f.precision();
            if (f.is_exact() && !f.terms().empty()) top = f.terms().rbegin()->first + 1;
            lh.samples = coefficient_heights(f, lo, top);
            out.push_back(std::move(lh));
        }
    return out;
}

// ---------------------------------------------------------------- empirical classes

GrowthClass classify_empirical(const std::vector<HeightSample>& samples, const EmpiricalOptions& opt) {
    require(samples.size() >= opt.min_samples, ErrorKind::InsufficientData,
            "empirical classification needs at least " + std::to_string(opt.min_samples) + " samples");
    GrowthClass gc;
    gc.mode = "empirical";
    gc.samples = samples.size();
    // Dyadic scales s = floor(log2 H); per-scale maximum height.
    std::map<long, long double> scale_max;
    for (const auto& s : samples) {
        long sc = static_cast<long>(std::floor(s.log_H / std::log(2.0L) + 1e-12L));
        auto [it, fresh] = scale_max.emplace(sc, s.height);
        if (!fresh) it->second = std::max(it->second, s.height);
        gc.max_log_H = std::max(gc.max_log_H, s.log_H);
    }
    std::vector<long double> logh, m;  // log H at the top of each scale, maximum height
    for (const auto& [sc, mx] : scale_max) {
        logh.push_back((sc + 1) * std::log(2.0L));
        m.push_back(mx);
    }

    // O-envelopes: ratios M_s / phi_r must not outgrow the early baseline.
    int strongest = 0;
    for (int r = 1; r <= 5; ++r) {
        std::vector<long double> ratios;
        for (std::size_t i = 0; i < m.size(); ++i) {
            long double phi = bound_function(r, logh[i]);
            if (phi >= 0.1L) ratios.push_back(m[i] / phi);
        }
        bool holds = true;
        if (ratios.size() >= 4) {
            const std::size_t half = (ratios.size() + 1) / 2;
            long double base = 0;
            for (std::size_t i = 0; i < half; ++i) base = std::max(base, ratios[i]);
            std::size_t violations = 0;
            for (std::size_t i = half; i < ratios.size(); ++i)
                if (ratios[i] > opt.slack * base + 1e-12L) ++violations;
            holds = violations <= static_cast<std::size_t>(opt.outlier_fraction * ratios.size());
        }
        gc.envelope_fits[static_cast<std::size_t>(r)] = holds;
        if (holds) strongest = r;
    }

    // Omega-visibility: heights track the bound function of C_r better than
    // that of C_{r+1}, with a clear positive slope and sustained growth.
    int weakest_omega = 6;
    for (int r = 1; r <= 4; ++r) {
        std::vector<long double> x, y, xt;
        for (std::size_t i = 0; i < m.size(); ++i) {
            long double phi = bound_function(r, logh[i]);
            if (phi < 0.1L) continue;
            x.push_back(phi);
            xt.push_back(bound_function(r + 1, logh[i]));
            y.push_back(m[i]);
        }
        if (x.size() < 4) continue;
        Fit f = least_squares(x, y), ft = least_squares(xt, y);
        const std::size_t mid = x.size() / 2;
        bool growth = y.back() - y[mid] >= 0.5L * f.beta * (x.back() - x[mid]);
        bool visible = f.beta > 0.25L && f.rms <= ft.rms && growth;
        gc.omega_visible[static_cast<std::size_t>(r)] = visible;
        if (visible) weakest_omega = std::min(weakest_omega, r);
    }

    int label = strongest;
    if (weakest_omega <= 4) label = std::min(label, weakest_omega);
    gc.label = static_cast<GrowthLabel>(label);
    gc.evidence = "scales=" + std::to_string(m.size()) + ", max log H=" + std::to_string(static_cast<double>(gc.max_log_H));
    if (weakest_omega <= 4)
        gc.notes.push_back("growth of the C" + std::to_string(weakest_omega) + " bound is visible in-sample: fails C" +
                           std::to_string(weakest_omega + 1));
    if (gc.label == GrowthLabel::C5 && gc.max_log_H > 1 && std::log(gc.max_log_H) <= opt.c4_c5_threshold)
        gc.notes.push_back("C4 and C5 are not separated in this sample range");
    return gc;
}

GrowthClass classify_series(const GeneralizedSeries& g, long p, const Rational& hi, const EmpiricalOptions& opt) {
    GrowthClass worst;
    worst.label = GrowthLabel::C5;
    worst.mode = "finite-support";
    bool any = false;
    for (const auto& lh : coefficient_heights(g, p, Rational(-1000000), hi)) {
        GrowthClass c;
        if (lh.finite) {
            c.label = GrowthLabel::C5;
            c.mode = "finite-support";
        } else {
            c = classify_empirical(lh.samples, opt);
        }
        c.evidence = lh.where + ": " + c.evidence;
        if (!any || static_cast<int>(c.label) < static_cast<int>(worst.label)) worst = c;
        any = true;
    }
    return worst;
}

// ---------------------------------------------------------------- denominators

namespace {

void classify_roots(DenominatorReport& rep) {
    rep.roots.clear();
    if (rep.candidate.degree() <= 0) return;
    Splitting sp = split_polynomial(rep.candidate, 24);
    for (const auto& r : sp.roots) {
        if (!rep.roots.empty() && rep.roots.back().root == r) {
            ++rep.roots.back().multiplicity;
            continue;
        }
        RootInfo info;
        info.root = r;
        if (!r.is_zero()) info.unity_order = is_root_of_unity(r);
        rep.roots.push_back(info);
    }
}

}  // namespace

DenominatorReport denominator_from_operator(const MahlerOperator& l) {
    DenominatorReport rep;
    rep.op = l;
    const Puiseux& a0 = l.coeff(0);
    require(!a0.is_zero() && a0.is_exact(), ErrorKind::InvalidArgument, "operator needs an exact nonzero a_0");
    // Strip the z-power and normalize to a monic polynomial in z.
    Rational v = a0.valuation();
    std::vector<Alg> cs;
    for (const auto& [e, c] : a0.terms()) {
        Rational k = e - v;
        require(is_integer(k), ErrorKind::InvalidArgument, "a_0 is not a polynomial in z");
        std::size_t idx = static_cast<std::size_t>(k.get_num().get_si());
        if (cs.size() <= idx) cs.resize(idx + 1, Alg(0));
        cs[idx] = c;
    }
    AlgPoly poly(std::move(cs));
    rep.candidate = poly.monic();
    rep.provenance = "monic part of a_0 of " + l.to_string();
    classify_roots(rep);
    return rep;
}

DenominatorReport mahler_denominator_candidate(const Puiseux& f, long p, int max_order, int max_degree) {
    for (const auto& [e, c] : f.terms())
        if (!is_integer(e)) {
            DenominatorReport rep;
            rep.zero_ideal = true;
            rep.candidate = AlgPoly::constant(Alg(0));
            rep.provenance = "non-integral exponent " + to_string(e) + ": the denominator ideal is zero";
            return rep;
        }
    auto g = guess_minimal_operator(f, p, max_order, max_degree);
    if (!g) raise(ErrorKind::NoRelationFound, "no annihilating operator within the guessing bounds");
    DenominatorReport rep = denominator_from_operator(g->op);
    rep.provenance = "monic part of a_0 of the guessed operator " + g->op.to_string() + " (verified to z^" +
                     to_string(g->verified_to) + ")";
    return rep;
}

GrowthClass classify_by_roots(const DenominatorReport& report, long p) {
    GrowthClass gc;
    gc.mode = "certified-by-roots";
    if (report.zero_ideal) {
        gc.label = GrowthLabel::Unknown;
        gc.evidence = report.provenance;
        return gc;
    }
    bool all_unity = true, all_unity_p = true;
    std::string roots;
    for (const auto& r : report.roots) {
        if (r.root.is_zero()) continue;
        if (!roots.empty()) roots += ", ";
        roots += r.root.to_string();
        if (!r.unity_order) {
            all_unity = all_unity_p = false;
            roots += " (not a root of unity)";
            continue;
        }
        roots += " (order " + std::to_string(*r.unity_order) + ")";
        if (gcd_long(*r.unity_order, p) == 1) all_unity_p = false;
    }
    gc.label = all_unity_p ? GrowthLabel::C3 : all_unity ? GrowthLabel::C2 : GrowthLabel::C1;
    gc.evidence = "nonzero roots: " + (roots.empty() ? std::string("none") : roots);
    gc.notes.push_back("via a multiple of the Mahler denominator (minimality of the operator is not verified)");
    return gc;
}

// ---------------------------------------------------------------- pullback

MahlerOperator pullback(const MahlerOperator& l, long nu, long k) {
    require(nu >= 1 && k >= 0 && gcd_long(nu, l.p()) == 1, ErrorKind::InvalidArgument,
            "pullback needs nu >= 1 coprime with p and k >= 0");
    return substitute(l, Rational(nu) * p_power(l.p(), k));
}

namespace {

GeneralizedSeries rescale(const GeneralizedSeries& g, long p, const Rational& m, long k) {
    GeneralizedSeries out;
    for (const auto& [key, x] : g.terms()) {
        XiExpr y;
        for (const auto& [w, f] : x.terms()) {
            XiIndex w2 = w;
            for (auto& a : w2.a) a *= m;
            y.add(w2, f.substitute(m));
        }
        // c^k e_c (l + k)^j = sum_i binom(j, i) k^(j-i) c^k e_c l^i
        Alg ck = key.c.pow(k);
        for (int i = 0; i <= key.j; ++i) {
            Alg coef = ck * Alg(Rational(binomial(key.j, i)) * pow(Rational(k), key.j - i));
            if (coef.is_zero()) continue;
            out.add(ExpLogKey{key.c, i}, Puiseux(coef) * y);
        }
    }
    return standardize(out, p);
}

}  // namespace

GeneralizedSeries pullback(const GeneralizedSeries& g, long p, long nu, long k) {
    require(nu >= 1 && k >= 0 && gcd_long(nu, p) == 1, ErrorKind::InvalidArgument,
            "pullback needs nu >= 1 coprime with p and k >= 0");
    return rescale(g, p, Rational(nu) * p_power(p, k), k);
}

GeneralizedSeries inverse_pullback(const GeneralizedSeries& g, long p, long nu, long k) {
    require(nu >= 1 && k >= 0 && gcd_long(nu, p) == 1, ErrorKind::InvalidArgument,
            "pullback needs nu >= 1 coprime with p and k >= 0");
    return rescale(g, p, 1 / (Rational(nu) * p_power(p, k)), -k);
}

// ---------------------------------------------------------------- purity

namespace {

// Exponent denominators of every coefficient and xi-index entry, split as p^k * nu.
std::pair<long, long> choose_nu_k(const GeneralizedSeries& g, long p) {
    Integer d = 1;
    for (const auto& [key, x] : g.terms())
        for (const auto& [w, f] : x.terms()) {
            for (const auto& a : w.a) d = lcm(d, a.get_den());
            for (const auto& [e, c] : f.terms()) d = lcm(d, e.get_den());
        }
    long k = 0;
    while (d % p == 0) d /= p, ++k;
    return {d.get_si(), k};
}

bool is_plain_series(const GeneralizedSeries& g, const Alg& c) {
    if (g.terms().size() != 1) return false;
    const auto& [key, x] = *g.terms().begin();
    return key.c == c && key.j == 0 && x.terms().size() == 1 && x.terms().begin()->first.empty();
}

}  // namespace

PurityReport purity_report(const GeneralizedSeries& f, long p, const PurityOptions& opt,
                           std::optional<MahlerOperator> supplied) {
    PurityReport rep;
    GeneralizedSeries fs = standardize(f, p);
    rep.input_class = classify_series(fs, p, opt.precision, opt.empirical);
    auto [nu, k] = choose_nu_k(fs, p);
    rep.nu = nu;
    rep.k = k;
    GeneralizedSeries g = (nu == 1 && k == 0) ? fs : pullback(fs, p, nu, k);

    if (supplied) {
        rep.op = pullback(*supplied, nu, k);
    } else {
        require(is_plain_series(g, Alg(1)), ErrorKind::InvalidArgument,
                "guessing needs a plain Puiseux series; supply the operator for generalized series");
        Puiseux s = g.part(Alg(1), 0).coefficient(XiIndex());
        Rational top = s.precision() ? std::min(*s.precision(), Rational(256)) : Rational(256);
        auto guess = guess_minimal_operator(s.truncated(top), p, opt.max_order, opt.max_degree);
        if (!guess) raise(ErrorKind::NoRelationFound, "no annihilating operator within the guessing bounds");
        rep.op = guess->op;
        rep.op_guessed = true;
        rep.warnings.push_back("operator guessed from " + to_string(top) +
                               " exponent units; minimality is assumed, not proven");
    }

    rep.basis = solution_basis(rep.op, opt.precision);
    for (std::size_t i = 0; i < rep.basis.size(); ++i) {
        const auto& b = rep.basis[i];
        GeneralizedSeries back = (nu == 1 && k == 0) ? b : inverse_pullback(b, p, nu, k);
        rep.basis_classes.push_back(classify_series(back, p, opt.precision, opt.empirical));
        // A basis element with a smaller annihilator shows the operator is not minimal for it.
        if (b.terms().size() == 1) {
            const auto& [key, x] = *b.terms().begin();
            if (key.j == 0 && x.terms().size() == 1 && x.terms().begin()->first.empty()) {
                const Puiseux& s = x.terms().begin()->second;
                bool integral = true;
                for (const auto& [e, c] : s.terms()) integral = integral && is_integer(e);
                if (integral && rep.op.order() > 1) {
                    Rational top = s.precision() ? std::min(*s.precision(), Rational(128)) : Rational(128);
                    auto small = guess_minimal_operator(s.truncated(top), p, rep.op.order() - 1, opt.max_degree);
                    if (small)
                        rep.warnings.push_back("operator is not minimal for basis element " + std::to_string(i) +
                                               " (annihilated by " + small->op.to_string() + ")");
                }
            }
        }
    }
    for (int r = 1; r <= 5; ++r) {
        bool all = true;
        for (const auto& c : rep.basis_classes) all = all && (c.satisfies(r) == rep.input_class.satisfies(r));
        rep.agree[static_cast<std::size_t>(r)] = all;
    }
    return rep;
}

}  // namespace mahler
