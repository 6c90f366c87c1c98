#include "mahler/reduction.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "mahler/factor.hpp"

namespace mahler {

namespace {

SeriesMatrix to_series(const AlgMatrix& m) {
    return m.map([](const Alg& x) { return Puiseux(x); });
}

AlgMatrix constant_term(const SeriesMatrix& m) {
    return m.map([](const Puiseux& x) { return x.coeff(Rational(0)); });
}

// Terms with exponent > 0, same precision.
Puiseux positive_part(const Puiseux& x) {
    Puiseux::Terms t;
    for (const auto& [e, c] : x.terms())
        if (sgn(e) > 0) t.emplace(e, c);
    return Puiseux::from_terms(std::move(t), x.precision());
}

// Terms with exponent < 0, exact.
Puiseux negative_part(const Puiseux& x) { return x.part_below(Rational(0)); }

SeriesMatrix mul(const AlgMatrix& c, const SeriesMatrix& m) { return to_series(c) * m; }
SeriesMatrix mul(const SeriesMatrix& m, const AlgMatrix& c) { return m * to_series(c); }

Puiseux embed_series(const Puiseux& f, const Alg& image) {
    Puiseux::Terms t;
    for (const auto& [e, x] : f.terms()) t.emplace(e, embed(x, image));
    return Puiseux::from_terms(std::move(t), f.precision());
}

MahlerOperator embed_operator(const MahlerOperator& l, const FieldPtr& field, const Alg& image) {
    if (!field) return l;
    std::vector<Puiseux> cs;
    for (const auto& c : l.coeffs()) cs.push_back(embed_series(c, image));
    return MahlerOperator(l.p(), std::move(cs));
}

MahlerSystem embed_system(const MahlerSystem& a, const FieldPtr& field, const Alg& image) {
    if (!field) return a;
    MahlerSystem s;
    s.p = a.p;
    s.num = a.num.map([&](const Puiseux& x) { return embed_series(x, image); });
    s.den = embed_series(a.den, image);
    return s;
}

std::vector<std::size_t> offsets_of(const std::vector<std::size_t>& blocks) {
    std::vector<std::size_t> off{0};
    for (auto b : blocks) off.push_back(off.back() + b);
    return off;
}

bool is_zero_alg_matrix(const AlgMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero()) return false;
    return true;
}

// Coefficients of a polynomial in k as rationals, ascending.
using KPoly = std::vector<Rational>;

KPoly kpoly_mul(const KPoly& a, const KPoly& b) {
    KPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// binomial(k + shift, m) as a polynomial in k.
KPoly binomial_in_k(long shift, long m) {
    KPoly r{Rational(1)};
    for (long i = 0; i < m; ++i) r = kpoly_mul(r, KPoly{Rational(shift - i), Rational(1)});
    Rational f = 1;
    for (long i = 2; i <= m; ++i) f *= i;
    for (auto& x : r) x /= f;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- xi matrices

XiMatrix xi_zero_matrix(std::size_t rows, std::size_t cols) { return XiMatrix(rows, cols, XiExpr()); }

XiMatrix xi_identity(std::size_t n) {
    XiMatrix m = xi_zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = XiExpr(Puiseux(1));
    return m;
}

XiMatrix to_xi_matrix(const SeriesMatrix& m) {
    XiMatrix out = xi_zero_matrix(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_exact_zero()) out(i, j) = XiExpr(m(i, j));
    return out;
}

XiMatrix xi_matmul(const XiMatrix& x, const XiMatrix& y, long p) {
    require(x.cols() == y.rows(), ErrorKind::InvalidArgument, "matrix shape mismatch in product");
    XiMatrix out = xi_zero_matrix(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            if (x(i, k).is_exact_zero()) continue;
            for (std::size_t j = 0; j < y.cols(); ++j) {
                if (y(k, j).is_exact_zero()) continue;
                out(i, j).add(xi_multiply(x(i, k), y(k, j), p));
            }
        }
    return out;
}

XiMatrix xi_matmul(const SeriesMatrix& x, const XiMatrix& y) {
    require(x.cols() == y.rows(), ErrorKind::InvalidArgument, "matrix shape mismatch in product");
    XiMatrix out = xi_zero_matrix(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            if (x(i, k).is_exact_zero()) continue;
            for (std::size_t j = 0; j < y.cols(); ++j)
                if (!y(k, j).is_exact_zero()) out(i, j).add(x(i, k) * y(k, j));
        }
    return out;
}

XiMatrix xi_matmul(const XiMatrix& x, const AlgMatrix& c) {
    require(x.cols() == c.rows(), ErrorKind::InvalidArgument, "matrix shape mismatch in product");
    XiMatrix out = xi_zero_matrix(x.rows(), c.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            if (x(i, k).is_exact_zero()) continue;
            for (std::size_t j = 0; j < c.cols(); ++j)
                if (!c(k, j).is_zero()) out(i, j).add(Puiseux(c(k, j)) * x(i, k));
        }
    return out;
}

XiMatrix sigma(const XiMatrix& m, long j, long p) {
    XiMatrix out = xi_zero_matrix(m.rows(), m.cols());
    for (std::size_t a = 0; a < m.rows(); ++a)
        for (std::size_t b = 0; b < m.cols(); ++b) out(a, b) = sigma(m(a, b), j, p);
    return out;
}

XiMatrix standardize(const XiMatrix& m, long p) {
    XiMatrix out = xi_zero_matrix(m.rows(), m.cols());
    for (std::size_t a = 0; a < m.rows(); ++a)
        for (std::size_t b = 0; b < m.cols(); ++b) out(a, b) = standardize(m(a, b), p);
    return out;
}

// ---------------------------------------------------------------- regular singular blocks

SeriesMatrix reduce_regular_singular(const SeriesMatrix& a, long p, const Rational& n) {
    require(a.square(), ErrorKind::InvalidArgument, "regular singular reduction needs a square matrix");
    const std::size_t d = a.rows();
    long kappa = 1;
    Rational known = n;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const Puiseux& x = a(i, j);
            if (x.precision() && *x.precision() < known) known = *x.precision();
            if (x.is_zero()) continue;
            require(sgn(x.valuation()) >= 0, ErrorKind::NotRegularSingularShape,
                    "entries must have nonnegative valuation");
            kappa = std::lcm(kappa, x.ramification());
        }
    AlgMatrix a0 = constant_term(a);
    auto a0_inv = try_inverse(a0);
    require(a0_inv.has_value(), ErrorKind::NotRegularSingularShape, "A(0) is not invertible");
    // Exponents n/kappa below the target.
    const Rational limit = std::min(n, known);
    long top = 0;
    while (make_rational(top + 1, kappa) < limit) ++top;
    std::vector<AlgMatrix> ak(static_cast<std::size_t>(top + 1));
    for (long k = 0; k <= top; ++k) {
        AlgMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = a(i, j).coeff(make_rational(k, kappa));
        ak[static_cast<std::size_t>(k)] = std::move(m);
    }
    std::vector<AlgMatrix> g(static_cast<std::size_t>(top + 1));
    g[0] = AlgMatrix::identity(d);
    for (long k = 1; k <= top; ++k) {
        AlgMatrix rhs(d, d);
        if (k % p == 0) rhs = g[static_cast<std::size_t>(k / p)] * a0;
        for (long k2 = 1; k2 <= k; ++k2) {
            if ((k - k2) % p != 0) continue;
            const AlgMatrix& ak2 = ak[static_cast<std::size_t>(k2)];
            if (is_zero_alg_matrix(ak2)) continue;
            rhs = rhs + g[static_cast<std::size_t>((k - k2) / p)] * ak2;
        }
        g[static_cast<std::size_t>(k)] = *a0_inv * rhs;
    }
    SeriesMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Puiseux::Terms t;
            for (long k = 0; k <= top; ++k) {
                const Alg& c = g[static_cast<std::size_t>(k)](i, j);
                if (!c.is_zero()) t.emplace(make_rational(k, kappa), c);
            }
            out(i, j) = Puiseux::from_terms(std::move(t), limit);
        }
    return out;
}

// ---------------------------------------------------------------- Step 1

BlockTriangular block_triangularize(const MahlerOperator& l, const Rational& n) {
    require(l.is_exact(), ErrorKind::InvalidArgument, "block triangularization needs an exact operator");
    const long p = l.p();
    const int d = l.order();
    const std::size_t du = static_cast<std::size_t>(d);
    BlockTriangular bt;
    bt.p = p;
    bt.factorization = factor_by_slopes(l, n);
    bt.field = bt.factorization.field;
    bt.generator_image = bt.factorization.generator_image;
    const auto& fs = bt.factorization.factors;

    // S_1 = h_1^-1, S_{k+1} = h_{k+1}^-1 (z^nu_k Phi - c_k) S_k; row k of T is z^slope_k S_k.
    bt.T = SeriesMatrix(du, du);
    std::vector<Puiseux> s(du);
    for (std::size_t k = 0; k < du; ++k) {
        const Puiseux hinv = fs[k].h.inverse(n);
        if (k == 0) {
            s[0] = hinv;
        } else {
            const auto& prev = fs[k - 1];
            std::vector<Puiseux> next(du);
            for (std::size_t i = 0; i < du; ++i) {
                if (s[i].is_exact_zero()) continue;
                if (i + 1 < du) next[i + 1] = next[i + 1] + s[i].sigma(1, p).shift(prev.nu);
                next[i] = next[i] - prev.c * s[i];
            }
            for (auto& x : next) x = (hinv * x).truncated(n);
            s = std::move(next);
        }
        for (std::size_t i = 0; i < du; ++i)
            if (!s[i].is_exact_zero()) bt.T(k, i) = s[i].shift(fs[k].slope);
    }
    bt.A1 = SeriesMatrix(du, du);
    for (std::size_t k = 0; k < du; ++k) {
        bt.A1(k, k) = Puiseux(fs[k].c);
        if (k + 1 < du) bt.A1(k, k + 1) = fs[k + 1].h.shift(fs[k].slope - fs[k + 1].slope);
    }
    for (std::size_t k = 0; k < du; ++k) {
        if (k == 0 || fs[k].slope != fs[k - 1].slope) {
            bt.blocks.push_back(0);
            bt.block_slopes.push_back(fs[k].slope);
        }
        ++bt.blocks.back();
    }
    // Regular singular reduction of each diagonal block.
    bt.G = SeriesMatrix(du, du);
    const auto off = offsets_of(bt.blocks);
    for (std::size_t b = 0; b < bt.blocks.size(); ++b) {
        SeriesMatrix blk = bt.A1.block(off[b], off[b], bt.blocks[b], bt.blocks[b]);
        bt.G.set_block(off[b], off[b], reduce_regular_singular(blk, p, n));
    }
    bt.A2 = truncate(sigma(bt.G, 1, p) * bt.A1 * series_inverse_best(bt.G, n), n);
    return bt;
}

// ---------------------------------------------------------------- Step 2

SeriesMatrix solve_positive_sylvester(const AlgMatrix& c1, const AlgMatrix& c2, const SeriesMatrix& b, long p,
                                      const Rational& n) {
    const AlgMatrix c1inv = inverse(c1);
    std::optional<Rational> v;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            if (b(i, j).is_zero()) continue;
            Rational e = b(i, j).valuation();
            require(sgn(e) > 0, ErrorKind::InvalidArgument, "right-hand side must have positive exponents only");
            if (!v || e < *v) v = e;
        }
    SeriesMatrix m(b.rows(), b.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = Puiseux::big_o(n);
    if (!v) return m;
    // sum_{k>=0} C1^{-k-1} sigma^k(B) C2^k; sigma^k(B) = O(z^(p^k v)).
    AlgMatrix left = c1inv, right = AlgMatrix::identity(c2.rows());
    for (long k = 0; p_power(p, k) * *v < n; ++k) {
        SeriesMatrix term = mul(mul(left, truncate(sigma(b, k, p), n)), right);
        m = truncate(m + term, n);
        left = c1inv * left;
        right = right * c2;
    }
    return m;
}

PositiveClearing clear_positive_offdiag(const SeriesMatrix& a, const std::vector<std::size_t>& blocks, long p,
                                        const Rational& n) {
    const std::size_t d = a.rows();
    const std::size_t nb = blocks.size();
    const auto off = offsets_of(blocks);
    PositiveClearing out;
    out.H = SeriesMatrix::identity(d);
    SeriesMatrix x = a;
    std::vector<AlgMatrix> diag(nb);
    for (std::size_t i = 0; i < nb; ++i) diag[i] = constant_term(x.block(off[i], off[i], blocks[i], blocks[i]));
    auto blk = [&](std::size_t i, std::size_t j) { return x.block(off[i], off[j], blocks[i], blocks[j]); };
    for (std::size_t delta = 1; delta < nb; ++delta)
        for (std::size_t i = 0; i + delta < nb; ++i) {
            const std::size_t j = i + delta;
            SeriesMatrix xij = blk(i, j);
            SeriesMatrix bpos = xij.map(positive_part);
            bool nothing = true;
            for (std::size_t r = 0; r < bpos.rows(); ++r)
                for (std::size_t c = 0; c < bpos.cols(); ++c) nothing = nothing && bpos(r, c).is_zero();
            if (nothing) continue;
            SeriesMatrix m = solve_positive_sylvester(diag[i], diag[j], bpos, p, n);
            SeriesMatrix sm = sigma(m, 1, p);
            // Block updates for the gauge I + M E_ij.
            x.set_block(off[i], off[j], truncate(xij + mul(sm, diag[j]) - mul(diag[i], m), n));
            for (std::size_t l = j + 1; l < nb; ++l)
                x.set_block(off[i], off[l], truncate(blk(i, l) + sm * blk(j, l), n));
            for (std::size_t l = 0; l < i; ++l)
                x.set_block(off[l], off[j], truncate(blk(l, j) - blk(l, i) * m, n));
            SeriesMatrix t = SeriesMatrix::identity(d);
            t.set_block(off[i], off[j], m);
            out.H = truncate(t * out.H, n);
        }
    out.Theta = x;
    return out;
}

// ---------------------------------------------------------------- Step 3

XiMatrix solve_xi_sylvester(const AlgMatrix& c1, const AlgMatrix& c2, const XiMatrix& b, long p) {
    const std::size_t r = c1.rows(), s = c2.rows();
    // C1 = S1 + N1 and C2^-1 = S2 + N2 (additive Dunford); both are
    // triangular in the pipeline, so the eigenvalues are the diagonals.
    auto eig_data = [](const AlgMatrix& m) {
        AdditiveDunford ad = dunford_additive(m);
        std::vector<Alg> ev;
        bool triangular = true;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < i; ++j) triangular = triangular && m(i, j).is_zero();
        if (triangular) {
            for (std::size_t i = 0; i < m.rows(); ++i) ev.push_back(m(i, i));
        } else {
            EigenStructure es = eigen_structure(m);
            require(!es.field || es.generator_image == Alg::generator(es.field), ErrorKind::UnsupportedSplitting,
                    "diagonal block eigenvalues leave the working field");
            ev = es.eigenvalues;
        }
        std::sort(ev.begin(), ev.end());
        AlgMatrix pm = semisimple_eigenbasis(ad.D, ev);
        AlgMatrix pinv = inverse(pm);
        AlgMatrix dd = pinv * ad.D * pm;
        std::vector<Alg> diag;
        for (std::size_t i = 0; i < m.rows(); ++i) diag.push_back(dd(i, i));
        return std::make_tuple(ad.N, pm, pinv, diag);
    };
    auto [n1, p1, p1inv, e1] = eig_data(c1);
    auto [n2, p2, p2inv, e2] = eig_data(inverse(c2));

    // Btilde = P1^-1 B P2.
    XiMatrix bt = xi_zero_matrix(r, s);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j)
            for (std::size_t k = 0; k < r; ++k) {
                if (p1inv(i, k).is_zero()) continue;
                for (std::size_t l = 0; l < s; ++l)
                    if (!p2(l, j).is_zero() && !b(k, l).is_exact_zero())
                        bt(i, j).add(Puiseux(p1inv(i, k) * p2(l, j)) * b(k, l));
            }

    std::vector<AlgMatrix> n1pow{AlgMatrix::identity(r)}, n2pow{AlgMatrix::identity(s)};
    while (!is_zero_alg_matrix(n1pow.back() * n1)) n1pow.push_back(n1pow.back() * n1);
    while (!is_zero_alg_matrix(n2pow.back() * n2)) n2pow.push_back(n2pow.back() * n2);

    XiMatrix f = xi_zero_matrix(r, s);
    for (std::size_t m = 0; m < n1pow.size(); ++m)
        for (std::size_t nn = 0; nn < n2pow.size(); ++nn) {
            // binomial(k-1, m) binomial(k, n) c1^(k-1-m) d^(k-n) summed against sigma^-k.
            KPoly poly = kpoly_mul(binomial_in_k(-1, static_cast<long>(m)), binomial_in_k(0, static_cast<long>(nn)));
            XiMatrix g = xi_zero_matrix(r, s);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < s; ++j) {
                    if (bt(i, j).is_exact_zero()) continue;
                    const Alg& c1v = e1[i];
                    const Alg& dv = e2[j];
                    Alg scale = c1v.pow(-1 - static_cast<long>(m)) * dv.pow(-static_cast<long>(nn));
                    XiExpr acc;
                    for (std::size_t al = 0; al < poly.size(); ++al) {
                        if (sgn(poly[al]) == 0) continue;
                        acc.add(Puiseux(Alg(poly[al]) * scale) *
                                xi_sigma_inverse_sum(static_cast<int>(al), c1v * dv, bt(i, j), p));
                    }
                    g(i, j) = acc;
                }
            AlgMatrix left = n1pow[m] * p1;
            AlgMatrix right = p2inv * n2pow[nn];
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < s; ++j)
                    for (std::size_t k = 0; k < r; ++k) {
                        if (left(i, k).is_zero()) continue;
                        for (std::size_t l = 0; l < s; ++l)
                            if (!right(l, j).is_zero() && !g(k, l).is_exact_zero())
                                f(i, j).add(Puiseux(left(i, k) * right(l, j)) * g(k, l));
                    }
        }
    return standardize(f, p);
}

Constantification constantify(const SeriesMatrix& theta, const std::vector<std::size_t>& blocks, long p) {
    const std::size_t d = theta.rows();
    const std::size_t nb = blocks.size();
    const auto off = offsets_of(blocks);
    Constantification out;
    out.C = constant_term(theta);
    // Exact nonpositive part of Theta.
    SeriesMatrix ex(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) ex(i, j) = negative_part(theta(i, j)) + Puiseux(out.C(i, j));
    out.K = xi_identity(d);
    auto xblk = [&](const XiMatrix& m, std::size_t i, std::size_t j) {
        XiMatrix r = xi_zero_matrix(blocks[i], blocks[j]);
        for (std::size_t a = 0; a < blocks[i]; ++a)
            for (std::size_t b = 0; b < blocks[j]; ++b) r(a, b) = m(off[i] + a, off[j] + b);
        return r;
    };
    auto cblk = [&](std::size_t i, std::size_t j) { return out.C.block(off[i], off[j], blocks[i], blocks[j]); };
    for (std::size_t delta = 1; delta < nb; ++delta)
        for (std::size_t i = 0; i + delta < nb; ++i) {
            const std::size_t j = i + delta;
            XiMatrix b = to_xi_matrix(ex.block(off[i], off[j], blocks[i], blocks[j]).map(negative_part));
            for (std::size_t a = 0; a < b.rows(); ++a)
                for (std::size_t c = 0; c < b.cols(); ++c) b(a, c) = -b(a, c);
            for (std::size_t k = i + 1; k < j; ++k) {
                XiMatrix plus = xi_matmul(to_xi_matrix(to_series(cblk(i, k))), xblk(out.K, k, j), p);
                XiMatrix minus = xi_matmul(sigma(xblk(out.K, i, k), 1, p),
                                           to_xi_matrix(ex.block(off[k], off[j], blocks[k], blocks[j])), p);
                for (std::size_t a = 0; a < b.rows(); ++a)
                    for (std::size_t c = 0; c < b.cols(); ++c) b(a, c) = b(a, c) + plus(a, c) - minus(a, c);
            }
            b = standardize(b, p);
            XiMatrix kij = solve_xi_sylvester(cblk(i, i), cblk(j, j), b, p);
            for (std::size_t a = 0; a < blocks[i]; ++a)
                for (std::size_t c = 0; c < blocks[j]; ++c) out.K(off[i] + a, off[j] + c) = kij(a, c);
        }
    return out;
}

// ---------------------------------------------------------------- verification

ResidualReport verify_gauge(const MahlerSystem& a, const XiMatrix& f, const AlgMatrix& c) {
    const long p = a.p;
    XiMatrix lhs = xi_matmul(sigma(f, 1, p), c);
    XiMatrix rhs = xi_matmul(a.num, f);
    ResidualReport rep;
    for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < f.cols(); ++j) {
            XiExpr r = standardize(a.den * lhs(i, j) - rhs(i, j), p);
            rep.terms_checked += r.terms().size();
            if (auto pr = r.precision(); pr && (!rep.precision || *pr < *rep.precision)) rep.precision = *pr;
            if (rep.zero && !r.is_zero()) {
                rep.zero = false;
                rep.first_nonzero = "entry (" + std::to_string(i) + "," + std::to_string(j) + "): " + r.to_string();
            }
        }
    return rep;
}

// ---------------------------------------------------------------- assembly

namespace {

XiMatrix unipotent_inverse(const XiMatrix& k, long p) {
    const std::size_t d = k.rows();
    XiMatrix u = k;
    for (std::size_t i = 0; i < d; ++i) u(i, i) = u(i, i) - XiExpr(Puiseux(1));
    XiMatrix neg = xi_zero_matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) neg(i, j) = -u(i, j);
    XiMatrix out = xi_identity(d), power = xi_identity(d);
    for (std::size_t m = 1; m < d; ++m) {
        power = standardize(xi_matmul(power, neg, p), p);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) out(i, j) = out(i, j) + power(i, j);
    }
    return standardize(out, p);
}

std::vector<std::size_t> eigen_runs(const AlgMatrix& c, const std::vector<std::size_t>& blocks) {
    std::vector<std::size_t> out;
    const auto off = offsets_of(blocks);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t i = off[b]; i < off[b + 1]; ++i) {
            if (i == off[b] || c(i, i) != c(i - 1, i - 1)) out.push_back(0);
            ++out.back();
        }
    return out;
}

ReductionResult reduce_operator_at(const MahlerOperator& l, const Rational& w) {
    const long p = l.p();
    BlockTriangular bt = block_triangularize(l, w);
    PositiveClearing pc = clear_positive_offdiag(bt.A2, bt.blocks, p, w);
    Constantification ct = constantify(pc.Theta, bt.blocks, p);
    ReductionResult res;
    res.p = p;
    res.field = bt.field;
    res.generator_image = bt.generator_image;
    res.F1 = series_inverse_best(bt.T, w) * series_inverse_best(bt.G, w) * series_inverse_best(pc.H, w);
    res.F2 = unipotent_inverse(ct.K, p);
    res.Theta = pc.Theta;
    res.C = ct.C;
    res.blocks = bt.blocks;
    res.block_slopes = bt.block_slopes;
    res.final_blocks = eigen_runs(ct.C, bt.blocks);
    res.system = equation_to_companion(embed_operator(l, bt.field, bt.generator_image));
    res.working_precision = w;
    return res;
}

}  // namespace

ReductionResult reduce_to_constant(const MahlerOperator& l, const Rational& n, const ReductionOptions& opt) {
    require(l.order() >= 1, ErrorKind::InvalidArgument, "reduction needs an operator of order >= 1");
    Rational extra = opt.margin;
    ReductionResult res;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
        res = reduce_operator_at(l, n + extra);
        res.residual = verify_gauge(res.system, xi_matmul(res.F1, res.F2), res.C);
        if (!res.residual.zero) return res;
        if (!res.residual.precision || !(*res.residual.precision < n)) return res;
        extra += (n - *res.residual.precision) + opt.margin;
    }
    return res;
}

ReductionResult reduce_to_constant(const MahlerSystem& a, const Rational& n, const ReductionOptions& opt) {
    CyclicResult cyc = system_to_operator(a);
    Rational extra = opt.margin;
    ReductionResult res;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
        const Rational w = n + extra;
        res = reduce_operator_at(cyc.op, w);
        // P = diag(1/q) V maps A to the companion system, so F_A = V^-1 diag(q) F.
        auto emb = [&](const Puiseux& x) { return res.field ? embed_series(x, res.generator_image) : x; };
        SeriesMatrix v = cyc.V.map(emb), qd(a.dim(), a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) qd(i, i) = emb(cyc.q[i]);
        res.F1 = series_inverse_best(v, w) * qd * res.F1;
        res.system = embed_system(a, res.field, res.generator_image);
        res.residual = verify_gauge(res.system, xi_matmul(res.F1, res.F2), res.C);
        if (!res.residual.zero) return res;
        if (!res.residual.precision || !(*res.residual.precision < n)) return res;
        extra += (n - *res.residual.precision) + opt.margin;
    }
    return res;
}

// ---------------------------------------------------------------- constant systems

LabelCombo sigma(const LabelCombo& x) {
    LabelCombo out;
    for (const auto& [key, coef] : x)
        for (int i = 0; i <= key.j; ++i) {
            Alg v = coef * key.c * Alg(Rational(binomial(key.j, i)));
            ExpLogKey k{key.c, i};
            auto it = out.find(k);
            if (it == out.end())
                out.emplace(k, v);
            else
                it->second += v;
        }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
}

std::string to_string(const LabelCombo& x) {
    if (x.empty()) return "0";
    std::string out;
    for (const auto& [key, coef] : x) {
        if (!out.empty()) out += " + ";
        out += "(" + coef.to_string() + ")*e[" + key.c.to_string() + "]";
        if (key.j == 1) out += "*l";
        if (key.j > 1) out += "*l^" + std::to_string(key.j);
    }
    return out;
}

LabelMatrix constant_solution_matrix(const AlgMatrix& c) {
    require(c.square(), ErrorKind::InvalidArgument, "constant system needs a square matrix");
    const std::size_t d = c.rows();
    EigenStructure es = eigen_structure(c);
    AlgMatrix ce = es.field ? embed(c, es.generator_image) : c;
    AlgMatrix u = ce * inverse(es.D);
    AlgMatrix nu = u - AlgMatrix::identity(d);
    // e_U = sum_k l^[k] (U - I)^k, with l^[k] expanded in powers of l.
    std::vector<AlgMatrix> npow{AlgMatrix::identity(d)};
    while (npow.size() < d && !is_zero_alg_matrix(npow.back() * nu)) npow.push_back(npow.back() * nu);
    LabelMatrix out(d, d, LabelCombo{});
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            LabelCombo acc;
            for (std::size_t m = 0; m < d; ++m) {
                // e_D(m, b) = sum_i P(m,i) P^-1(i,b) e_{c_i}
                for (std::size_t i = 0; i < d; ++i) {
                    Alg ed = es.P(m, i) * es.P_inv(i, b);
                    if (ed.is_zero()) continue;
                    for (std::size_t k = 0; k < npow.size(); ++k) {
                        const Alg& nk = npow[k](a, m);
                        if (nk.is_zero()) continue;
                        KPoly lk = binomial_in_k(0, static_cast<long>(k));
                        for (std::size_t j = 0; j < lk.size(); ++j) {
                            if (sgn(lk[j]) == 0) continue;
                            ExpLogKey key{es.diagonal[i], static_cast<int>(j)};
                            acc[key] += nk * ed * Alg(lk[j]);
                        }
                    }
                }
            }
            std::erase_if(acc, [](const auto& kv) { return kv.second.is_zero(); });
            out(a, b) = std::move(acc);
        }
    return out;
}

Matrix<GeneralizedSeries> symbolic_solution_matrix(const XiMatrix& f, const LabelMatrix& e, long p) {
    Matrix<GeneralizedSeries> out(f.rows(), e.cols(), GeneralizedSeries{});
    for (std::size_t a = 0; a < f.rows(); ++a)
        for (std::size_t b = 0; b < e.cols(); ++b) {
            GeneralizedSeries g;
            for (std::size_t m = 0; m < f.cols(); ++m) {
                if (f(a, m).is_exact_zero()) continue;
                for (const auto& [key, coef] : e(m, b)) g.add(key, Puiseux(coef) * f(a, m));
            }
            out(a, b) = standardize(g, p);
        }
    return out;
}

// ---------------------------------------------------------------- bases

namespace {

struct Monomial {
    ExpLogKey key;
    XiIndex w;
    Rational e;
};

// c ascending, higher log powers first, nonempty xi indices first, exponent ascending.
bool monomial_less(const Monomial& x, const Monomial& y) {
    if (int k = x.key.c.compare(y.key.c); k != 0) return k < 0;
    if (x.key.j != y.key.j) return x.key.j > y.key.j;
    if (x.w.empty() != y.w.empty()) return !x.w.empty();
    if (int k = x.w.compare(y.w); k != 0) return k < 0;
    return x.e < y.e;
}

std::optional<Monomial> leading_monomial(const GeneralizedSeries& g) {
    std::optional<Monomial> best;
    for (const auto& [key, x] : g.terms())
        for (const auto& [w, f] : x.terms())
            for (const auto& [e, c] : f.terms()) {
                if (c.is_zero()) continue;
                Monomial m{key, w, e};
                if (!best || monomial_less(m, *best)) best = m;
                break;  // terms are sorted by exponent
            }
    return best;
}

std::optional<Alg> coefficient_at(const GeneralizedSeries& g, const Monomial& m) {
    Puiseux f = g.part(m.key.c, m.key.j).coefficient(m.w);
    if (!f.known(m.e)) return std::nullopt;
    return f.coeff(m.e);
}

}  // namespace

std::vector<GeneralizedSeries> canonical_basis(std::vector<GeneralizedSeries> sols) {
    std::vector<std::pair<Monomial, GeneralizedSeries>> basis;
    for (auto& g : sols) {
        for (const auto& [m, b] : basis)
            if (auto c = coefficient_at(g, m); c && !c->is_zero()) g = g - Puiseux(*c) * b;
        auto lead = leading_monomial(g);
        if (!lead) continue;
        Alg lc = *coefficient_at(g, *lead);
        g = Puiseux(lc.inverse()) * g;
        for (auto& [m, b] : basis)
            if (auto c = coefficient_at(b, *lead); c && !c->is_zero()) b = b - Puiseux(*c) * g;
        basis.emplace_back(*lead, g);
    }
    std::sort(basis.begin(), basis.end(),
              [](const auto& x, const auto& y) { return monomial_less(x.first, y.first); });
    std::vector<GeneralizedSeries> out;
    for (auto& [m, b] : basis) {
        // Drop (c, j) parts that vanish identically at the known precision.
        GeneralizedSeries kept;
        for (const auto& [key, x] : b.terms())
            if (!x.is_zero()) kept.add(key, x);
        out.push_back(std::move(kept));
    }
    return out;
}

std::vector<GeneralizedSeries> solution_basis(const MahlerOperator& l, const Rational& n,
                                              const ReductionOptions& opt) {
    ReductionResult res = reduce_to_constant(l, n, opt);
    require(res.residual.zero, ErrorKind::PrecisionLoss, "reduction residual is not zero: " + res.residual.first_nonzero);
    LabelMatrix e = constant_solution_matrix(res.C);
    XiMatrix f = xi_matmul(res.F1, res.F2);
    XiMatrix row = xi_zero_matrix(1, f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) row(0, j) = f(0, j);
    Matrix<GeneralizedSeries> y = symbolic_solution_matrix(row, e, l.p());
    std::vector<GeneralizedSeries> sols;
    for (std::size_t j = 0; j < y.cols(); ++j) sols.push_back(y(0, j));
    return canonical_basis(std::move(sols));
}

}  // namespace mahler
