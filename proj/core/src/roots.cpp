#include "mahler/roots.hpp"

#include <algorithm>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>

namespace mahler {

namespace {

using HP = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<60>,
                                         boost::multiprecision::et_off>;

struct CHP {
    HP re, im;
};

CHP operator+(const CHP& a, const CHP& b) { return {a.re + b.re, a.im + b.im}; }
CHP operator-(const CHP& a, const CHP& b) { return {a.re - b.re, a.im - b.im}; }
CHP operator*(const CHP& a, const CHP& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
CHP operator/(const CHP& a, const CHP& b) {
    HP d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
HP cabs(const CHP& a) { return sqrt(a.re * a.re + a.im * a.im); }

HP to_hp(const Rational& q) {
    HP n(q.get_num().get_str());
    HP d(q.get_den().get_str());
    return n / d;
}

std::vector<CHP> aberth(const std::vector<HP>& a) {
    const std::size_t n = a.size() - 1;
    std::vector<CHP> z(n);
    if (n == 0) return z;
    HP bound = 0;
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, HP(abs(a[i] / a[n])));
    HP radius = 1 + bound;
    // Use a smaller radius when it is clearly an overestimate (Fujiwara-like).
    HP fuj = 0;
    for (std::size_t i = 0; i < n; ++i) {
        HP r = abs(a[i] / a[n]);
        if (r == 0) continue;
        HP root = pow(r, HP(1) / HP(static_cast<long>(n - i)));
        fuj = std::max(fuj, root);
    }
    if (fuj > 0) radius = std::min(radius, HP(2 * fuj));
    const HP two_pi = 2 * boost::math::constants::pi<HP>();
    for (std::size_t k = 0; k < n; ++k) {
        HP ang = two_pi * HP(static_cast<long>(k)) / HP(static_cast<long>(n)) + HP(0.4);
        z[k] = {radius * cos(ang), radius * sin(ang)};
    }
    std::vector<HP> da(n);
    for (std::size_t i = 1; i <= n; ++i) da[i - 1] = a[i] * HP(static_cast<long>(i));
    auto horner = [](const std::vector<HP>& c, const CHP& x) {
        CHP r{HP(0), HP(0)};
        for (std::size_t i = c.size(); i-- > 0;) r = r * x + CHP{c[i], HP(0)};
        return r;
    };
    const HP tol = HP("1e-55");
    for (int iter = 0; iter < 2000; ++iter) {
        HP maxstep = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHP f = horner(a, z[i]);
            CHP fp = horner(da, z[i]);
            if (cabs(f) == 0) continue;
            CHP ratio = f / fp;
            CHP sum{HP(0), HP(0)};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                CHP diff = z[i] - z[j];
                if (cabs(diff) == 0) diff = {HP("1e-40"), HP(0)};
                sum = sum + CHP{HP(1), HP(0)} / diff;
            }
            CHP denom = CHP{HP(1), HP(0)} - ratio * sum;
            CHP w = ratio / denom;
            z[i] = z[i] - w;
            maxstep = std::max(maxstep, HP(cabs(w) / (1 + cabs(z[i]))));
        }
        if (maxstep < tol) break;
    }
    return z;
}

}  // namespace

std::vector<IsolatedRoot> isolate_roots(const QPoly& f) {
    std::vector<IsolatedRoot> out;
    if (f.degree() <= 0) return out;
    std::vector<HP> a;
    for (const auto& c : f.coeffs()) a.push_back(to_hp(c));
    auto z = aberth(a);
    const std::size_t n = z.size();
    // Snap nearly-real roots to the real axis and make conjugate pairs exact.
    for (auto& r : z)
        if (abs(r.im) < HP("1e-45") * (1 + abs(r.re))) r.im = 0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        HP dre = z[x].re - z[y].re;
        HP scale = 1 + abs(z[x].re) + abs(z[y].re);
        if (abs(dre) > HP("1e-40") * scale) return dre < 0;
        return z[x].im < z[y].im;
    });
    HP lc = abs(a.back());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = order[k];
        CHP val{HP(0), HP(0)};
        for (std::size_t j = a.size(); j-- > 0;) val = val * z[i] + CHP{a[j], HP(0)};
        HP prod = lc;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) prod *= cabs(z[i] - z[j]);
        HP rad = prod == 0 ? HP(1) : HP(HP(static_cast<long>(n)) * cabs(val) / prod);
        IsolatedRoot r;
        r.value = ComplexLD(static_cast<long double>(z[i].re), static_cast<long double>(z[i].im));
        r.radius = static_cast<long double>(rad);
        out.push_back(r);
    }
    return out;
}

std::vector<ComplexLD> complex_roots(const QPoly& f) {
    std::vector<ComplexLD> out;
    for (const auto& r : isolate_roots(f)) out.push_back(r.value);
    return out;
}

int nearest_root_index(const std::vector<IsolatedRoot>& roots, ComplexLD z) {
    int best = -1;
    long double bestd = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        long double d = std::abs(roots[i].value - z);
        if (best < 0 || d < bestd) {
            best = static_cast<int>(i);
            bestd = d;
        }
    }
    return best;
}

long double log_mahler_measure(const std::vector<Integer>& coeffs, long double* error_bound) {
    QPoly f = from_integer_coeffs(coeffs);
    long double result = 0;
    long double err = 0;
    {
        HP lc = abs(HP(coeffs.back().get_str()));
        result = static_cast<long double>(log(lc));
    }
    for (const auto& r : isolate_roots(f)) {
        long double m = std::abs(r.value);
        if (m > 1) result += std::log(m);
        // d/dm log m = 1/m <= 1 on m >= 1
        if (m + r.radius > 1) err += r.radius;
    }
    if (error_bound) *error_bound = err;
    return result;
}

std::vector<QPoly> split_squarefree_over_q(const QPoly& f) {
    std::vector<QPoly> out;
    if (f.degree() <= 0) return out;
    if (f.degree() == 1) {
        out.push_back(f.monic());
        return out;
    }
    auto c = primitive_integer_coeffs(f);
    const std::size_t n = c.size() - 1;
    const Integer lc = c.back();
    // Monic integer transform F(x) = lc^(n-1) f(x / lc).
    std::vector<Integer> big(n + 1);
    {
        Integer q = 1;
        for (std::size_t i = n; i-- > 0;) {
            big[i] = c[i] * q;
            q *= lc;
        }
        big[n] = 1;
    }
    std::vector<HP> a;
    for (const auto& v : big) a.push_back(HP(v.get_str()));
    auto z = aberth(a);
    for (auto& r : z)
        if (abs(r.im) < HP("1e-40") * (1 + abs(r.re))) r.im = 0;
    // Units: real roots and conjugate pairs (a rational factor is closed under conjugation).
    std::vector<std::vector<CHP>> units;
    std::vector<bool> used(z.size(), false);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (z[i].im == 0) {
            units.push_back({z[i]});
            continue;
        }
        std::size_t best = z.size();
        HP bd = 0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (used[j]) continue;
            HP d = cabs(CHP{z[j].re - z[i].re, z[j].im + z[i].im});
            if (best == z.size() || d < bd) {
                best = j;
                bd = d;
            }
        }
        if (best == z.size()) raise(ErrorKind::PrecisionLoss, "unpaired complex root during factorization");
        used[best] = true;
        units.push_back({z[i], z[best]});
    }
    QPoly rest = from_integer_coeffs(big);
    std::vector<QPoly> found;
    long budget = 4000000;
    auto near_int = [](const HP& x, Integer& out) {
        HP r = round(x);
        if (abs(x - r) > HP("1e-25") * (1 + abs(x))) return false;
        mpfr_get_z(out.get_mpz_t(), r.backend().data(), MPFR_RNDN);
        return true;
    };
    bool progress = true;
    while (progress && !units.empty()) {
        progress = false;
        std::size_t total = 0;
        for (const auto& u : units) total += u.size();
        const std::size_t m = units.size();
        // Enumerate subsets by increasing size via index combinations.
        for (std::size_t k = 1; k <= m && !progress; ++k) {
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            while (true) {
                if (--budget < 0) raise(ErrorKind::UnsupportedSplitting, "factorization search budget exhausted");
                std::size_t deg = 0;
                HP tr = 0;
                for (auto i : idx) {
                    deg += units[i].size();
                    for (const auto& r : units[i]) tr += r.re;
                }
                Integer ti;
                if (deg * 2 <= total && deg < total && near_int(tr, ti)) {
                    std::vector<CHP> prod{CHP{HP(1), HP(0)}};
                    for (auto i : idx)
                        for (const auto& r : units[i]) {
                            std::vector<CHP> next(prod.size() + 1, CHP{HP(0), HP(0)});
                            for (std::size_t j = 0; j < prod.size(); ++j) {
                                next[j + 1] = next[j + 1] + prod[j];
                                next[j] = next[j] - prod[j] * r;
                            }
                            prod = std::move(next);
                        }
                    std::vector<Integer> g;
                    bool ok = true;
                    for (const auto& x : prod) {
                        Integer v;
                        if (!near_int(x.re, v)) {
                            ok = false;
                            break;
                        }
                        g.push_back(v);
                    }
                    if (ok) {
                        QPoly gq = from_integer_coeffs(g);
                        QPoly q, r;
                        QPoly::divmod(rest, gq, q, r);
                        if (r.is_zero()) {
                            found.push_back(gq);
                            rest = q;
                            std::vector<std::vector<CHP>> keep;
                            for (std::size_t i = 0; i < m; ++i)
                                if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(units[i]);
                            units = std::move(keep);
                            progress = true;
                            break;
                        }
                    }
                }
                // next combination
                std::size_t pos = k;
                while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
                if (pos == 0) break;
                ++idx[pos - 1];
                for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
            }
        }
    }
    if (rest.degree() >= 1) found.push_back(rest.monic());
    // Transform back: g(x) = G(lc x), made monic.
    for (const auto& g : found) out.push_back(g.scaled(Rational(lc)).monic());
    return out;
}

}  // namespace mahler
