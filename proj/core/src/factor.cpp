#include "mahler/factor.hpp"

#include <algorithm>

#include "mahler/matrix.hpp"
#include "mahler/roots.hpp"

namespace mahler {

namespace {

bool poly_less(const QPoly& a, const QPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (long i = a.degree(); i >= 0; --i) {
        int c = cmp(a.coeff(static_cast<std::size_t>(i)), b.coeff(static_cast<std::size_t>(i)));
        if (c != 0) return c < 0;
    }
    return false;
}

bool alg_poly_less(const AlgPoly& a, const AlgPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (long i = a.degree(); i >= 0; --i) {
        int c = a.coeff(static_cast<std::size_t>(i)).compare(b.coeff(static_cast<std::size_t>(i)));
        if (c != 0) return c < 0;
    }
    return false;
}

FieldPtr field_of(const AlgPoly& f) { return common_field(f.coeffs()); }

// Norm from K[x] to Q[x] by evaluation at integer points and interpolation.
QPoly norm_poly(const AlgPoly& g, int field_degree) {
    const long deg = g.degree() * field_degree;
    std::vector<Rational> xs, ys;
    for (long i = 0; i <= deg; ++i) {
        Alg v = g(Alg(i));
        xs.emplace_back(i);
        // A rational value viewed in a field of degree n has norm v^n.
        ys.push_back(v.is_rational() ? pow(v.rational(), field_degree) : v.norm());
    }
    return interpolate(xs, ys);
}

std::vector<AlgPoly> trager_squarefree(const AlgPoly& f, const FieldPtr& base = nullptr) {
    FieldPtr k = field_of(f);
    if (!k) k = base;
    if (f.degree() <= 1) return {f.monic()};
    if (!k) {
        auto q = to_rational_poly(f);
        std::vector<AlgPoly> out;
        for (const auto& g : split_squarefree_over_q(*q)) out.push_back(to_alg_poly(g));
        return out;
    }
    const Alg theta = Alg::generator(k);
    for (long s : {0L, 1L, -1L, 2L, -2L, 3L, -3L, 4L, 5L, 7L, 11L}) {
        Alg shift = Alg(s) * theta;
        AlgPoly g = f.shifted(-shift);
        QPoly n = norm_poly(g, k->degree());
        if (poly_gcd(n, n.derivative()).degree() > 0) continue;
        auto parts = split_squarefree_over_q(n);
        if (parts.size() == 1) return {f.monic()};
        std::vector<AlgPoly> out;
        AlgPoly rest = g.monic();
        for (const auto& part : parts) {
            AlgPoly h = poly_gcd(rest, to_alg_poly(part));
            if (h.degree() <= 0) continue;
            rest = rest / h;
            out.push_back(h.shifted(shift).monic());
        }
        require(rest.degree() <= 0, ErrorKind::UnsupportedSplitting, "norm factorization did not account for all factors");
        return out;
    }
    raise(ErrorKind::UnsupportedSplitting, "no squarefree norm found in shift budget");
}

struct Extension {
    FieldPtr field;
    Alg old_generator;  // image of the old generator (0 when the old field is Q)
    Alg root;           // image of y, a root of the extending factor
};

// Builds L = K[y]/(h) as a simple extension with an embedding compatible with K.
Extension extend_field(const FieldPtr& k, const AlgPoly& h) {
    const int e = static_cast<int>(h.degree());
    if (!k) {
        auto q = to_rational_poly(h);
        FieldPtr l = NumberField::create(q->monic(), 0);
        return {l, Alg(0), Alg::generator(l)};
    }
    const int n = k->degree();
    const int dim = n * e;
    AlgPoly hm = h.monic();
    const Alg theta = Alg::generator(k);
    // Elements of L: e coordinates in K (powers of y).
    auto flatten = [&](const std::vector<Alg>& v) {
        std::vector<Rational> out(static_cast<std::size_t>(dim));
        for (int j = 0; j < e; ++j) {
            auto c = v[static_cast<std::size_t>(j)].coords(n);
            for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i + n * j)] = c[static_cast<std::size_t>(i)];
        }
        return out;
    };
    auto mul_y = [&](const std::vector<Alg>& v) {
        std::vector<Alg> out(static_cast<std::size_t>(e), Alg(0));
        for (int j = 0; j + 1 < e; ++j) out[static_cast<std::size_t>(j + 1)] = v[static_cast<std::size_t>(j)];
        const Alg& top = v[static_cast<std::size_t>(e - 1)];
        for (int j = 0; j < e; ++j) out[static_cast<std::size_t>(j)] -= top * hm.coeff(static_cast<std::size_t>(j));
        return out;
    };
    for (long s : {1L, 2L, -1L, 3L, -2L, 5L, 7L, -3L, 11L}) {
        // gamma = y + s*theta; multiplication matrix on basis t^i y^j.
        auto mul_gamma = [&](const std::vector<Alg>& v) {
            auto out = mul_y(v);
            for (int j = 0; j < e; ++j) out[static_cast<std::size_t>(j)] += Alg(s) * theta * v[static_cast<std::size_t>(j)];
            return out;
        };
        Matrix<Rational> m(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
        for (int j = 0; j < e; ++j)
            for (int i = 0; i < n; ++i) {
                std::vector<Alg> b(static_cast<std::size_t>(e), Alg(0));
                std::vector<Rational> tc(static_cast<std::size_t>(n));
                tc[static_cast<std::size_t>(i)] = 1;
                b[static_cast<std::size_t>(j)] = Alg::from_coords(k, tc);
                auto col = flatten(mul_gamma(b));
                for (int r = 0; r < dim; ++r) m(static_cast<std::size_t>(r), static_cast<std::size_t>(i + n * j)) = col[static_cast<std::size_t>(r)];
            }
        QPoly cp = charpoly(m);
        if (poly_gcd(cp, cp.derivative()).degree() > 0) continue;
        // Powers of gamma as columns.
        Matrix<Rational> v(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
        std::vector<Alg> cur(static_cast<std::size_t>(e), Alg(0));
        cur[0] = Alg(1);
        for (int c = 0; c < dim; ++c) {
            auto col = flatten(cur);
            for (int r = 0; r < dim; ++r) v(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = col[static_cast<std::size_t>(r)];
            cur = mul_gamma(cur);
        }
        Matrix<Rational> vinv = inverse(v);
        auto express = [&](int basis_index) {
            std::vector<Rational> out(static_cast<std::size_t>(dim));
            for (int r = 0; r < dim; ++r) out[static_cast<std::size_t>(r)] = vinv(static_cast<std::size_t>(r), static_cast<std::size_t>(basis_index));
            return out;
        };
        auto t_coords = express(1);
        auto y_coords = express(n);
        auto roots = isolate_roots(cp);
        ComplexLD target = k->generator_value();
        int best = 0;
        long double bestd = -1;
        for (std::size_t r = 0; r < roots.size(); ++r) {
            ComplexLD z = roots[r].value, acc = 0;
            for (std::size_t i = t_coords.size(); i-- > 0;) acc = acc * z + static_cast<long double>(to_double(t_coords[i]));
            long double d = std::abs(acc - target);
            if (bestd < 0 || d < bestd) {
                bestd = d;
                best = static_cast<int>(r);
            }
        }
        FieldPtr l = NumberField::create(cp, best);
        return {l, Alg::from_coords(l, t_coords), Alg::from_coords(l, y_coords)};
    }
    raise(ErrorKind::UnsupportedSplitting, "no primitive element found for field extension");
}

}  // namespace

std::vector<std::pair<QPoly, int>> factor_rational(const QPoly& f) {
    std::vector<std::pair<QPoly, int>> out;
    for (const auto& [g, m] : squarefree_decomposition(f))
        for (const auto& h : split_squarefree_over_q(g)) out.emplace_back(h, m);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (poly_less(a.first, b.first)) return true;
        if (poly_less(b.first, a.first)) return false;
        return a.second < b.second;
    });
    return out;
}

std::vector<std::pair<AlgPoly, int>> factor_over_field(const AlgPoly& f) {
    std::vector<std::pair<AlgPoly, int>> out;
    for (const auto& [g, m] : squarefree_decomposition(f))
        for (const auto& h : trager_squarefree(g)) out.emplace_back(h, m);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (alg_poly_less(a.first, b.first)) return true;
        if (alg_poly_less(b.first, a.first)) return false;
        return a.second < b.second;
    });
    return out;
}

Alg embed(const Alg& x, const Alg& image) {
    if (x.is_rational()) return x;
    const int n = x.field()->degree();
    auto c = x.coords(n);
    Alg r(0);
    for (int i = n; i-- > 0;) r = r * image + Alg(c[static_cast<std::size_t>(i)]);
    return r;
}

AlgPoly embed(const AlgPoly& f, const Alg& image) {
    std::vector<Alg> c;
    for (const auto& x : f.coeffs()) c.push_back(embed(x, image));
    return AlgPoly(std::move(c));
}

Splitting split_polynomial(const AlgPoly& f, int max_degree, const FieldPtr& base) {
    Splitting s;
    s.field = field_of(f);
    if (!s.field) s.field = base;
    s.generator_image = s.field ? Alg::generator(s.field) : Alg(0);
    std::vector<std::pair<AlgPoly, int>> pending;
    for (const auto& pm : squarefree_decomposition(f)) pending.push_back(pm);
    while (!pending.empty()) {
        auto [g, m] = pending.back();
        pending.pop_back();
        if (g.degree() <= 0) continue;
        if (g.degree() == 1) {
            Alg r = -g.coeff(0) / g.coeff(1);
            for (int i = 0; i < m; ++i) s.roots.push_back(r);
            continue;
        }
        auto factors = trager_squarefree(g, s.field);
        std::vector<AlgPoly> nonlinear;
        for (const auto& h : factors) {
            if (h.degree() == 1) {
                Alg r = -h.coeff(0) / h.coeff(1);
                for (int i = 0; i < m; ++i) s.roots.push_back(r);
            } else {
                nonlinear.push_back(h);
            }
        }
        if (nonlinear.empty()) continue;
        std::sort(nonlinear.begin(), nonlinear.end(), alg_poly_less);
        const AlgPoly& h = nonlinear.front();
        const int cur = s.field ? s.field->degree() : 1;
        if (cur * h.degree() > max_degree)
            raise(ErrorKind::UnsupportedSplitting,
                  "splitting field degree would exceed " + std::to_string(max_degree));
        Extension ext = extend_field(s.field, h);
        auto map_alg = [&](const Alg& x) { return s.field ? embed(x, ext.old_generator) : x; };
        auto map_poly = [&](const AlgPoly& p) {
            std::vector<Alg> c;
            for (const auto& x : p.coeffs()) c.push_back(map_alg(x));
            return AlgPoly(std::move(c));
        };
        for (auto& r : s.roots) r = map_alg(r);
        s.generator_image = map_alg(s.generator_image);
        for (auto& [p, mm] : pending) p = map_poly(p);
        AlgPoly hm = map_poly(h);
        for (int i = 0; i < m; ++i) s.roots.push_back(ext.root);
        AlgPoly rest = hm / AlgPoly({-ext.root, Alg(1)});
        pending.emplace_back(rest, m);
        for (std::size_t i = 1; i < nonlinear.size(); ++i) pending.emplace_back(map_poly(nonlinear[i]), m);
        s.field = ext.field;
    }
    std::sort(s.roots.begin(), s.roots.end());
    return s;
}

std::vector<Alg> roots_by_minpoly(const QPoly& f) {
    std::vector<Alg> out;
    for (const auto& [g, m] : factor_rational(f)) {
        if (g.degree() == 1) {
            for (int i = 0; i < m; ++i) out.emplace_back(Rational(-g.coeff(0)));
            continue;
        }
        auto roots = isolate_roots(g);
        for (std::size_t r = 0; r < roots.size(); ++r) {
            Alg a = Alg::generator(NumberField::create(g, static_cast<int>(r)));
            for (int i = 0; i < m; ++i) out.push_back(a);
        }
    }
    return out;
}

}  // namespace mahler
