#include "mahler/operators.hpp"

#include <algorithm>
#include <map>

namespace mahler {

namespace {

std::vector<Puiseux> trim_top(std::vector<Puiseux> a) {
    while (!a.empty() && a.back().is_exact_zero()) a.pop_back();
    return a;
}

long common_ramification(const std::vector<Puiseux>& xs) {
    long k = 1;
    for (const auto& x : xs) k = static_cast<long>(lcm64(k, x.ramification()));
    return k;
}

// Value of an exact series at z = t^kappa (kappa a multiple of its ramification).
Alg eval_at(const Puiseux& f, long kappa, const Rational& t) {
    require(f.is_exact(), ErrorKind::InvalidArgument, "evaluation of a truncated series");
    Alg s(0);
    for (const auto& [e, c] : f.terms()) s += c * Alg(pow(t, to_long(Rational(e * kappa))));
    return s;
}

// Exact series in w = z^(1/kappa) as a polynomial after removing z^shift.
AlgPoly to_poly_in_root(const Puiseux& f, long kappa, const Rational& shift) {
    std::vector<Alg> c;
    for (const auto& [e, x] : f.terms()) {
        long i = to_long(Rational((e - shift) * kappa));
        if (static_cast<long>(c.size()) <= i) c.resize(static_cast<std::size_t>(i + 1), Alg(0));
        c[static_cast<std::size_t>(i)] = x;
    }
    return AlgPoly(std::move(c));
}

Puiseux from_poly_in_root(const AlgPoly& g, long kappa) {
    Puiseux::Terms t;
    for (int i = 0; i <= g.degree(); ++i)
        if (!g.coeff(i).is_zero()) t.emplace(make_rational(i, kappa), g.coeff(i));
    return Puiseux::from_terms(std::move(t));
}

// Divides the exact coefficients by their polynomial gcd (a left unit).
MahlerOperator remove_content(const MahlerOperator& l) {
    if (!l.is_exact() || l.is_zero()) return l;
    const long kappa = common_ramification(l.coeffs());
    std::optional<Rational> lo;
    for (const auto& c : l.coeffs())
        if (!c.is_zero() && (!lo || c.valuation() < *lo)) lo = c.valuation();
    std::vector<AlgPoly> polys;
    AlgPoly g;
    for (const auto& c : l.coeffs()) {
        polys.push_back(to_poly_in_root(c, kappa, *lo));
        g = poly_gcd(g, polys.back());
    }
    std::vector<Puiseux> out;
    for (const auto& q : polys) out.push_back(from_poly_in_root(q / g, kappa));
    return MahlerOperator(l.p(), std::move(out)).normalized();
}

Puiseux det_puiseux(const SeriesMatrix& m) {
    if (m.rows() == 0) return Puiseux(1);
    Poly<Puiseux> chi = charpoly(m);
    Puiseux c0 = chi.coeff(0);
    return (m.rows() % 2 == 0) ? c0 : -c0;
}

// Independent columns of the rows (evaluated at a sample point), or fewer
// than rows.size() entries when the rows are dependent there.
std::vector<std::size_t> independent_columns(const std::vector<std::vector<Puiseux>>& rows) {
    if (rows.empty()) return {};
    std::vector<Puiseux> all;
    for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    const long kappa = common_ramification(all);
    std::vector<std::size_t> best;
    for (const Rational& t : {make_rational(7, 5), make_rational(-11, 3), make_rational(19, 13)}) {
        Matrix<Alg> m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = eval_at(rows[i][j], kappa, t);
        auto red = row_reduce(m);
        if (red.pivots.size() > best.size()) best = red.pivots;
        if (best.size() == rows.size()) break;
    }
    return best;
}

Rational min_precision(const SeriesMatrix& m, const Rational& fallback) {
    std::optional<Rational> lo;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const auto& pr = m(i, j).precision();
            if (pr && (!lo || *pr < *lo)) lo = *pr;
        }
    return lo ? *lo : fallback;
}

}  // namespace

// ---------------------------------------------------------------- operators

MahlerOperator::MahlerOperator(long p, std::vector<Puiseux> coeffs) : p_(p), a_(trim_top(std::move(coeffs))) {
    require(p >= 2, ErrorKind::InvalidArgument, "Mahler radix p must be at least 2");
}

bool MahlerOperator::is_exact() const {
    return std::all_of(a_.begin(), a_.end(), [](const Puiseux& c) { return c.is_exact(); });
}

MahlerOperator operator+(const MahlerOperator& a, const MahlerOperator& b) {
    require(a.p_ == b.p_, ErrorKind::InvalidArgument, "operators with different p");
    std::vector<Puiseux> c(std::max(a.a_.size(), b.a_.size()));
    for (std::size_t i = 0; i < a.a_.size(); ++i) c[i] += a.a_[i];
    for (std::size_t i = 0; i < b.a_.size(); ++i) c[i] += b.a_[i];
    return MahlerOperator(a.p_, std::move(c));
}

MahlerOperator operator-(const MahlerOperator& a, const MahlerOperator& b) {
    return a + Puiseux(-1) * b;
}

MahlerOperator operator*(const MahlerOperator& a, const MahlerOperator& b) {
    require(a.p_ == b.p_, ErrorKind::InvalidArgument, "operators with different p");
    if (a.a_.empty() || b.a_.empty()) return MahlerOperator(a.p_, {});
    std::vector<Puiseux> c(a.a_.size() + b.a_.size() - 1);
    for (std::size_t i = 0; i < a.a_.size(); ++i) {
        if (a.a_[i].is_exact_zero()) continue;
        for (std::size_t j = 0; j < b.a_.size(); ++j)
            c[i + j] += a.a_[i] * b.a_[j].sigma(static_cast<long>(i), a.p_);
    }
    return MahlerOperator(a.p_, std::move(c));
}

MahlerOperator operator*(const Puiseux& c, const MahlerOperator& a) {
    std::vector<Puiseux> out;
    for (const auto& x : a.a_) out.push_back(c * x);
    return MahlerOperator(a.p_, std::move(out));
}

Puiseux MahlerOperator::apply(const Puiseux& f) const {
    Puiseux s;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * f.sigma(static_cast<long>(i), p_);
    return s;
}

MahlerOperator MahlerOperator::normalized() const {
    require(is_exact(), ErrorKind::InvalidArgument, "normalization needs exact coefficients");
    std::optional<Rational> lo;
    for (const auto& c : a_)
        if (!c.is_zero() && (!lo || c.valuation() < *lo)) lo = c.valuation();
    if (!lo) return *this;
    Alg lead;
    for (const auto& c : a_)
        if (!c.is_zero()) {
            lead = c.leading_coefficient();
            break;
        }
    std::vector<Puiseux> out;
    const Alg inv = lead.inverse();
    for (const auto& c : a_) out.push_back(inv * c.shift(-*lo));
    return MahlerOperator(p_, std::move(out));
}

bool MahlerOperator::same_up_to_unit(const MahlerOperator& other) const {
    if (p_ != other.p_ || order() != other.order()) return false;
    auto a = remove_content(*this), b = remove_content(other);
    for (int i = 0; i <= a.order(); ++i)
        if (!(a.coeff(i) == b.coeff(i))) return false;
    return true;
}

std::string MahlerOperator::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (a_[i].is_exact_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + a_[i].to_string() + ")";
        if (i == 1) out += "*M";
        if (i > 1) out += "*M^" + std::to_string(i);
    }
    if (out.empty()) out = "0";
    return out + " @ p=" + std::to_string(p_);
}

MahlerOperator substitute(const MahlerOperator& l, const Rational& m) {
    std::vector<Puiseux> out;
    for (const auto& c : l.coeffs()) out.push_back(c.substitute(m));
    return MahlerOperator(l.p(), std::move(out));
}

// ---------------------------------------------------------------- systems

SeriesMatrix MahlerSystem::series(const Rational& n) const {
    if (den.is_exact() && den.terms().size() == 1) {
        Puiseux inv = den.inverse(n);
        return num.map([&](const Puiseux& x) { return inv * x; });
    }
    Rational lo = n;
    for (std::size_t i = 0; i < num.rows(); ++i)
        for (std::size_t j = 0; j < num.cols(); ++j)
            if (!num(i, j).is_zero()) lo = std::min(lo, num(i, j).valuation());
    Puiseux inv = den.inverse(n - lo + 1);
    return num.map([&](const Puiseux& x) { return (inv * x).truncated(n); });
}

SeriesMatrix sigma(const SeriesMatrix& m, long j, long p) {
    return m.map([&](const Puiseux& x) { return x.sigma(j, p); });
}

SeriesMatrix truncate(const SeriesMatrix& m, const Rational& n) {
    return m.map([&](const Puiseux& x) { return x.is_exact() ? x : x.truncated(n); });
}

namespace {

// Gauss-Jordan at working precision w; entries of the result carry their own precision.
SeriesMatrix series_inverse_at(const SeriesMatrix& m, const Rational& w) {
    const std::size_t n = m.rows();
    SeriesMatrix a = m, inv = SeriesMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::optional<std::size_t> piv;
        for (std::size_t r = col; r < n; ++r) {
            if (a(r, col).is_zero()) continue;
            if (!piv || a(r, col).valuation() < a(*piv, col).valuation()) piv = r;
        }
        require(piv.has_value(), ErrorKind::SingularGauge, "gauge matrix not invertible at working precision");
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(*piv, j), a(col, j));
            std::swap(inv(*piv, j), inv(col, j));
        }
        Puiseux s = a(col, col).inverse(w);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) = (s * a(col, j)).truncated(w);
            inv(col, j) = (s * inv(col, j)).truncated(w);
        }
        a(col, col) = Puiseux(1);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_exact_zero()) continue;
            Puiseux f = a(r, col);
            for (std::size_t j = 0; j < n; ++j) {
                if (!a(col, j).is_exact_zero()) a(r, j) = (a(r, j) - f * a(col, j)).truncated(w);
                if (!inv(col, j).is_exact_zero()) inv(r, j) = (inv(r, j) - f * inv(col, j)).truncated(w);
            }
            a(r, col) = Puiseux();
        }
    }
    return inv;
}

}  // namespace

SeriesMatrix series_inverse(const SeriesMatrix& m, const Rational& target) {
    require(m.square(), ErrorKind::InvalidArgument, "inverse of non-square matrix");
    Rational extra = 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        SeriesMatrix inv = series_inverse_at(m, target + extra);
        Rational got = min_precision(inv, target);
        if (!(got < target)) return truncate(inv, target);
        extra += (target - got) + 2;
    }
    raise(ErrorKind::PrecisionLoss, "series matrix inverse could not reach the requested precision");
}

SeriesMatrix series_inverse_best(const SeriesMatrix& m, const Rational& work) {
    require(m.square(), ErrorKind::InvalidArgument, "inverse of non-square matrix");
    SeriesMatrix inv = series_inverse_at(m, work);
    return truncate(inv, min_precision(inv, work));
}

MahlerSystem equation_to_companion(const MahlerOperator& l) {
    const int d = l.order();
    require(d >= 1, ErrorKind::InvalidArgument, "companion system needs an operator of order >= 1");
    require(l.is_exact(), ErrorKind::InvalidArgument, "companion system needs exact coefficients");
    MahlerSystem s;
    s.p = l.p();
    s.num = SeriesMatrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    const Puiseux& ad = l.coeff(d);
    for (int i = 0; i + 1 < d; ++i) s.num(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1)) = ad;
    for (int k = 0; k < d; ++k) s.num(static_cast<std::size_t>(d - 1), static_cast<std::size_t>(k)) = -l.coeff(k);
    s.den = ad;
    // Clear a monomial denominator so simple inputs stay polynomial.
    if (ad.terms().size() == 1) {
        s.num = s.num.map([&](const Puiseux& x) { return x * ad.inverse(0); });
        s.den = Puiseux(1);
    }
    return s;
}

MahlerSystem gauge_apply(const SeriesMatrix& r, const MahlerSystem& a, const Rational& n) {
    require(r.square() && r.rows() == a.dim(), ErrorKind::InvalidArgument, "gauge shape mismatch");
    Rational extra = 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Rational w = n + extra;
        SeriesMatrix out = sigma(r, 1, a.p) * a.series(w) * series_inverse(r, w);
        Rational got = min_precision(out, n);
        if (!(got < n)) {
            MahlerSystem s;
            s.p = a.p;
            s.num = truncate(out, n);
            return s;
        }
        extra += (n - got) + 2;
    }
    raise(ErrorKind::PrecisionLoss, "gauge transform could not reach the requested precision");
}

// ---------------------------------------------------------------- Newton polygon

NewtonData newton_polygon(const MahlerOperator& l) {
    NewtonData nd;
    const long p = l.p();
    struct Pt {
        int i;
        Rational x, y;
    };
    std::vector<Pt> pts;
    for (int i = 0; i <= l.order(); ++i) {
        if (l.coeff(i).is_exact_zero()) continue;
        pts.push_back({i, p_power(p, i), l.coeff(i).valuation()});
    }
    std::vector<Pt> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            // Keep b only if it lies strictly below the segment a-q.
            Rational cross = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
            if (sgn(cross) <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    for (const auto& h : hull) nd.vertices.emplace_back(h.x, h.y);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const Pt& a = hull[k];
        const Pt& b = hull[k + 1];
        NewtonEdge e;
        e.slope = (b.y - a.y) / (b.x - a.x);
        e.start = a.i;
        e.end = b.i;
        e.multiplicity = b.i - a.i;
        std::vector<Alg> cp(static_cast<std::size_t>(e.multiplicity + 1), Alg(0));
        for (const auto& q : pts) {
            if (q.i < a.i || q.i > b.i) continue;
            if (q.y - a.y == e.slope * (q.x - a.x)) cp[static_cast<std::size_t>(q.i - a.i)] = l.coeff(q.i).leading_coefficient();
        }
        e.characteristic = AlgPoly(std::move(cp));
        e.exponents = split_polynomial(e.characteristic).roots;
        nd.edges.push_back(std::move(e));
    }
    return nd;
}

// ---------------------------------------------------------------- cyclic vectors

std::size_t generic_rank(const std::vector<std::vector<Puiseux>>& rows) { return independent_columns(rows).size(); }

MahlerOperator operator_from_orbit(const std::vector<std::vector<Puiseux>>& orbit, long p) {
    require(orbit.size() >= 2, ErrorKind::InvalidArgument, "orbit needs at least two vectors");
    const std::size_t m = orbit.size() - 1;
    std::vector<std::vector<Puiseux>> head(orbit.begin(), orbit.end() - 1);
    auto cols = independent_columns(head);
    require(cols.size() == m, ErrorKind::InvalidArgument, "orbit vectors are dependent");
    SeriesMatrix v(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) v(i, j) = orbit[i][cols[j]];
    std::vector<Puiseux> coeffs(m + 1);
    coeffs[m] = det_puiseux(v);
    for (std::size_t k = 0; k < m; ++k) {
        SeriesMatrix w = v;
        for (std::size_t j = 0; j < m; ++j) w(k, j) = orbit[m][cols[j]];
        coeffs[k] = -det_puiseux(w);
    }
    return remove_content(MahlerOperator(p, std::move(coeffs)));
}

CyclicResult system_to_operator(const MahlerSystem& a, int budget) {
    const std::size_t d = a.dim();
    require(d >= 1, ErrorKind::InvalidArgument, "empty system");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            require(a.num(i, j).is_exact(), ErrorKind::InvalidArgument, "cyclic vector search needs exact entries");
    std::vector<std::vector<Puiseux>> candidates;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Puiseux> e(d);
        e[i] = Puiseux(1);
        candidates.push_back(e);
    }
    for (int j = 1; static_cast<int>(candidates.size()) < budget && j <= budget; ++j)
        for (std::size_t k = 1; k < d && static_cast<int>(candidates.size()) < budget; ++k) {
            std::vector<Puiseux> e(d);
            e[0] = Puiseux(1);
            e[k] = Puiseux::z(j);
            candidates.push_back(e);
        }
    int tried = 0;
    for (const auto& start : candidates) {
        ++tried;
        std::vector<std::vector<Puiseux>> v{start};
        std::vector<Puiseux> q{Puiseux(1)};
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<Puiseux> next(d);
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t i = 0; i < d; ++i)
                    if (!v.back()[i].is_exact_zero()) next[j] += v.back()[i].sigma(1, a.p) * a.num(i, j);
            v.push_back(std::move(next));
            q.push_back(q.back().sigma(1, a.p) * a.den);
        }
        std::vector<std::vector<Puiseux>> head(v.begin(), v.end() - 1);
        if (independent_columns(head).size() < d) continue;
        SeriesMatrix vm(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) vm(i, j) = v[i][j];
        std::vector<Puiseux> coeffs(d + 1);
        coeffs[d] = det_puiseux(vm) * q[d];
        for (std::size_t k = 0; k < d; ++k) {
            SeriesMatrix w = vm;
            for (std::size_t j = 0; j < d; ++j) w(k, j) = v[d][j];
            coeffs[k] = -det_puiseux(w) * q[k];
        }
        CyclicResult out;
        out.op = remove_content(MahlerOperator(a.p, std::move(coeffs)));
        out.V = vm;
        out.q.assign(q.begin(), q.end() - 1);
        out.candidates_tried = tried;
        return out;
    }
    raise(ErrorKind::CyclicSearchExhausted, "no cyclic vector among " + std::to_string(tried) + " candidates");
}

// ---------------------------------------------------------------- division and factorization

DivisionResult right_divide(const MahlerOperator& l, const MahlerOperator& m, const Rational& precision) {
    require(!m.is_zero(), ErrorKind::InvalidArgument, "right division by the zero operator");
    const long p = l.p();
    const int dm = m.order();
    std::vector<Puiseux> r = l.coeffs();
    for (auto& c : r) c = c.is_exact() ? c : c.truncated(precision);
    const int dl = l.order();
    std::vector<Puiseux> q(static_cast<std::size_t>(std::max(dl - dm + 1, 0)));
    const Puiseux& lead = m.coeff(dm);
    require(!lead.is_zero(), ErrorKind::PrecisionLoss, "leading coefficient of the divisor is indeterminate");
    for (int k = dl; k >= dm; --k) {
        const Puiseux& rk = r[static_cast<std::size_t>(k)];
        if (rk.is_exact_zero()) continue;
        const long s = k - dm;
        Puiseux qs = rk * lead.sigma(s, p).inverse(precision - rk.valuation_lower_bound());
        if (!qs.is_exact()) qs = qs.truncated(precision);
        q[static_cast<std::size_t>(s)] = qs;
        for (int j = 0; j <= dm; ++j) {
            Puiseux t = qs * m.coeff(j).sigma(s, p);
            auto& dst = r[static_cast<std::size_t>(s + j)];
            dst = dst - t;
            if (!dst.is_exact()) dst = dst.truncated(precision);
        }
    }
    r.resize(static_cast<std::size_t>(std::min(dm, dl + 1)));
    return {MahlerOperator(p, std::move(q)), MahlerOperator(p, std::move(r))};
}

MahlerOperator FirstOrderFactor::as_operator(const Rational& precision) const {
    Puiseux hinv = h.inverse(precision);
    return MahlerOperator(p, {-(c * hinv), hinv.sigma(1, p).shift(nu)});
}

namespace {

struct PeelResult {
    FirstOrderFactor factor;
    MahlerOperator quotient;
};

// Peels the rightmost first-order factor for the smallest slope of `cur`.
PeelResult peel(const MahlerOperator& cur, const std::vector<Alg>& root_pool, const Rational& work) {
    const long p = cur.p();
    const int m = cur.order();
    NewtonData nd;
    // Only the first edge is needed; compute it without splitting.
    Rational mu;
    std::vector<Alg> cp;
    {
        struct Pt {
            int i;
            Rational x, y;
        };
        std::vector<Pt> pts;
        for (int i = 0; i <= m; ++i)
            if (!cur.coeff(i).is_zero()) pts.push_back({i, p_power(p, i), cur.coeff(i).valuation()});
        require(!pts.empty() && pts[0].i == 0, ErrorKind::FactorRecurrenceStuck, "zero constant coefficient");
        std::optional<Rational> best;
        for (std::size_t k = 1; k < pts.size(); ++k) {
            Rational s = (pts[k].y - pts[0].y) / (pts[k].x - pts[0].x);
            if (!best || s < *best) best = s;
        }
        mu = *best;
        int last = 0;
        for (const auto& q : pts)
            if (q.y - pts[0].y == mu * (q.x - pts[0].x)) last = q.i;
        cp.assign(static_cast<std::size_t>(last + 1), Alg(0));
        for (const auto& q : pts)
            if (q.i <= last && q.y - pts[0].y == mu * (q.x - pts[0].x))
                cp[static_cast<std::size_t>(q.i)] = cur.coeff(q.i).leading_coefficient();
    }
    AlgPoly chi(cp);
    std::optional<Alg> c;
    for (const auto& r : root_pool)
        if (chi(r).is_zero()) {
            c = r;
            break;
        }
    require(c.has_value(), ErrorKind::FactorRecurrenceStuck, "edge exponent not found in the splitting field");
    const Rational theta = -mu;
    const Rational nu = mu * (p - 1);
    // b_i = a_i c^i z^(p^i theta)
    std::vector<Puiseux> b;
    Alg ci(1);
    for (int i = 0; i <= m; ++i) {
        b.push_back(ci * cur.coeff(i).shift(p_power(p, i) * theta));
        ci *= *c;
    }
    const Rational m0 = b[0].valuation();
    const Alg lead_inv = b[0].leading_coefficient().inverse();
    long k = 1;
    Rational avail = work;
    for (const auto& bi : b) {
        for (const auto& [e, x] : bi.terms()) k = static_cast<long>(lcm64(k, to_long(Integer(Rational(e - m0).get_den()))));
        if (bi.precision()) avail = std::min(avail, Rational(*bi.precision() - m0));
    }
    const Rational top = m0 + avail;
    std::map<Rational, Alg> res;
    auto add_terms = [&](const Alg& coef, const Rational& shift_scale) {
        for (int i = 0; i <= m; ++i) {
            const Rational sh = p_power(p, i) * shift_scale;
            for (const auto& [e, x] : b[static_cast<std::size_t>(i)].terms()) {
                Rational at = e + sh;
                if (!(at < top)) break;
                res[at] += coef * x;
            }
        }
    };
    add_terms(Alg(1), Rational(0));
    {
        auto it = res.find(m0);
        require(it == res.end() || it->second.is_zero(), ErrorKind::FactorRecurrenceStuck,
                "exponent is not a root of the edge polynomial");
    }
    Puiseux::Terms h{{Rational(0), Alg(1)}};
    for (long n = 1;; ++n) {
        Rational step = make_rational(n, k);
        if (!(step < avail)) break;
        auto it = res.find(m0 + step);
        if (it == res.end() || it->second.is_zero()) continue;
        Alg hn = -(it->second * lead_inv);
        h.emplace(step, hn);
        add_terms(hn, step);
    }
    Puiseux hs = Puiseux::from_terms(std::move(h), avail);
    FirstOrderFactor f{p, nu, mu, *c, hs};
    // Quotient: cur = Q (z^nu Phi - c) h^{-1}.
    Puiseux hinv = hs.inverse(avail);
    Puiseux r0 = -(*c * hinv);
    std::vector<Puiseux> q(static_cast<std::size_t>(m));
    q[static_cast<std::size_t>(m - 1)] = cur.coeff(m) * hs.sigma(m, p).shift(-p_power(p, m - 1) * nu);
    for (int i = m - 1; i >= 1; --i) {
        Puiseux t = cur.coeff(i) - q[static_cast<std::size_t>(i)] * r0.sigma(i, p);
        q[static_cast<std::size_t>(i - 1)] = t * hs.sigma(i, p).shift(-p_power(p, i - 1) * nu);
    }
    Puiseux rem = cur.coeff(0) - q[0] * r0;
    require(rem.is_zero(), ErrorKind::FactorRecurrenceStuck, "first-order factor leaves a nonzero remainder");
    return {f, MahlerOperator(p, std::move(q))};
}

}  // namespace

Factorization factor_by_slopes(const MahlerOperator& l, const Rational& precision) {
    require(l.order() >= 1, ErrorKind::InvalidArgument, "factorization needs order >= 1");
    require(!l.coeff(0).is_zero(), ErrorKind::InvalidArgument, "operator has zero constant coefficient");
    // One field for all exponents.
    NewtonData nd;
    AlgPoly prod = AlgPoly::constant(Alg(1));
    {
        // Characteristic polynomials without splitting each edge separately.
        MahlerOperator tmp = l;
        const long p = l.p();
        std::vector<std::pair<int, Rational>> pts;
        for (int i = 0; i <= l.order(); ++i)
            if (!l.coeff(i).is_zero()) pts.emplace_back(i, l.coeff(i).valuation());
        std::vector<std::pair<int, Rational>> hull;
        auto X = [&](int i) { return p_power(p, i); };
        for (const auto& q : pts) {
            while (hull.size() >= 2) {
                const auto& a = hull[hull.size() - 2];
                const auto& b = hull.back();
                Rational cross = (X(b.first) - X(a.first)) * (q.second - a.second) -
                                 (b.second - a.second) * (X(q.first) - X(a.first));
                if (sgn(cross) <= 0)
                    hull.pop_back();
                else
                    break;
            }
            hull.push_back(q);
        }
        for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
            const auto& a = hull[e];
            const auto& b = hull[e + 1];
            Rational slope = (b.second - a.second) / (X(b.first) - X(a.first));
            std::vector<Alg> cp(static_cast<std::size_t>(b.first - a.first + 1), Alg(0));
            for (const auto& q : pts)
                if (q.first >= a.first && q.first <= b.first && q.second - a.second == slope * (X(q.first) - X(a.first)))
                    cp[static_cast<std::size_t>(q.first - a.first)] = l.coeff(q.first).leading_coefficient();
            prod = prod * AlgPoly(std::move(cp));
        }
    }
    Splitting sp = split_polynomial(prod);
    MahlerOperator base = l;
    if (sp.field) {
        std::vector<Puiseux> cs;
        for (const auto& c : l.coeffs()) {
            Puiseux::Terms t;
            for (const auto& [e, x] : c.terms()) t.emplace(e, embed(x, sp.generator_image));
            cs.push_back(Puiseux::from_terms(std::move(t), c.precision()));
        }
        base = MahlerOperator(l.p(), std::move(cs));
    }
    Rational extra = 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Rational work = precision + extra;
        Factorization out;
        out.field = sp.field;
        out.generator_image = sp.generator_image;
        MahlerOperator cur = base;
        std::optional<Rational> achieved;
        while (cur.order() >= 1) {
            PeelResult pr = peel(cur, sp.roots, work);
            const Rational hp = *pr.factor.h.precision();
            if (!achieved || hp < *achieved) achieved = hp;
            out.factors.push_back(std::move(pr.factor));
            cur = std::move(pr.quotient);
        }
        out.unit = cur.coeff(0);
        out.achieved_precision = *achieved;
        if (!(*achieved < precision)) return out;
        extra += (precision - *achieved) * 2 + 2;
    }
    raise(ErrorKind::PrecisionLoss, "slope factorization could not reach the requested precision");
}

// ---------------------------------------------------------------- guessing

std::optional<GuessResult> guess_minimal_operator(const Puiseux& f, long p, int max_order, int max_degree) {
    require(p >= 2, ErrorKind::InvalidArgument, "Mahler radix p must be at least 2");
    require(!f.is_zero(), ErrorKind::InvalidArgument, "cannot guess a relation for the zero series");
    require(f.ramification() == 1, ErrorKind::InvalidArgument, "guessing expects integer exponents");
    if (f.is_exact() && f.terms().size() == 1 && f.valuation() == 0) {
        // A constant: Phi - 1.
        GuessResult g;
        g.op = MahlerOperator(p, {Puiseux(-1), Puiseux(1)});
        g.order = 1;
        g.verified_to = Rational(0);
        return g;
    }
    require(f.precision().has_value(), ErrorKind::InvalidArgument, "guessing needs a truncated series");
    const Rational nf = *f.precision();
    const Rational v = f.valuation();
    for (int r = 1; r <= max_order; ++r) {
        const Rational lo = sgn(v) < 0 ? Rational(v * p_power(p, r)) : v;
        for (int deg = 0; deg <= max_degree; ++deg) {
            const long unknowns = static_cast<long>(r + 1) * (deg + 1);
            const long first = to_long(ceil_of(lo));
            const long last = to_long(ceil_of(nf)) - 1;  // exponents < nf
            const long eqs = last - first + 1;
            if (eqs < unknowns + 4) continue;
            Matrix<Alg> m(static_cast<std::size_t>(eqs), static_cast<std::size_t>(unknowns));
            for (long e = first; e <= last; ++e) {
                for (int i = 0; i <= r; ++i) {
                    const Rational scale = p_power(p, i);
                    for (int j = 0; j <= deg; ++j) {
                        Rational src = Rational(e - j) / scale;
                        if (!is_integer(src)) continue;
                        if (!f.known(src)) continue;
                        Alg c = f.coeff(src);
                        if (!c.is_zero())
                            m(static_cast<std::size_t>(e - first), static_cast<std::size_t>(i * (deg + 1) + j)) = c;
                    }
                }
            }
            Matrix<Alg> ns = nullspace(m);
            for (std::size_t col = 0; col < ns.cols(); ++col) {
                std::vector<Puiseux> coeffs;
                for (int i = 0; i <= r; ++i) {
                    Puiseux::Terms t;
                    for (int j = 0; j <= deg; ++j) {
                        const Alg& x = ns(static_cast<std::size_t>(i * (deg + 1) + j), col);
                        if (!x.is_zero()) t.emplace(Rational(j), x);
                    }
                    coeffs.push_back(Puiseux::from_terms(std::move(t)));
                }
                if (coeffs.front().is_zero() || coeffs.back().is_zero()) continue;
                GuessResult g;
                g.op = remove_content(MahlerOperator(p, std::move(coeffs)));
                g.order = r;
                g.degree = deg;
                g.verified_to = nf;
                g.equations = eqs;
                g.unknowns = unknowns;
                return g;
            }
        }
    }
    return std::nullopt;
}

}  // namespace mahler
