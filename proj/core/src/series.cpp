#include "mahler/series.hpp"

#include <algorithm>

namespace mahler {

Rational p_power(long p, long j) {
    Rational r = 1;
    for (long i = 0; i < (j < 0 ? -j : j); ++i) r *= p;
    return j < 0 ? Rational(1 / r) : r;
}

Puiseux::Puiseux(const Alg& c) {
    if (!c.is_zero()) terms_.emplace(Rational(0), c);
}

Puiseux Puiseux::monomial(const Alg& c, const Rational& e) {
    Puiseux f;
    if (!c.is_zero()) f.terms_.emplace(e, c);
    return f;
}

Puiseux Puiseux::big_o(const Rational& n) {
    Puiseux f;
    f.prec_ = n;
    return f;
}

Puiseux Puiseux::from_terms(Terms terms, std::optional<Rational> precision) {
    Puiseux f;
    for (auto& [e, c] : terms)
        if (!c.is_zero()) f.terms_.emplace(e, c);
    f.prec_ = std::move(precision);
    f.erase_from_precision();
    return f;
}

void Puiseux::erase_from_precision() {
    if (!prec_) return;
    terms_.erase(terms_.lower_bound(*prec_), terms_.end());
}

Alg Puiseux::coeff(const Rational& e) const {
    if (!known(e))
        raise(ErrorKind::PrecisionLoss, "coefficient of z^" + mahler::to_string(e) + " beyond precision " +
                                            mahler::to_string(*prec_));
    auto it = terms_.find(e);
    return it == terms_.end() ? Alg(0) : it->second;
}

long Puiseux::ramification() const {
    long k = 1;
    for (const auto& [e, c] : terms_) k = static_cast<long>(lcm64(k, to_long(Integer(e.get_den()))));
    return k;
}

Rational Puiseux::valuation() const {
    require(!terms_.empty(), ErrorKind::IndeterminateValuation,
            "valuation undetermined: no nonzero coefficient below precision");
    return terms_.begin()->first;
}

Alg Puiseux::leading_coefficient() const {
    require(!terms_.empty(), ErrorKind::IndeterminateValuation,
            "leading coefficient undetermined: no nonzero coefficient below precision");
    return terms_.begin()->second;
}

Rational Puiseux::valuation_lower_bound() const {
    if (!terms_.empty()) return terms_.begin()->first;
    require(prec_.has_value(), ErrorKind::IndeterminateValuation, "valuation of exact zero");
    return *prec_;
}

Puiseux Puiseux::truncated(const Rational& n) const {
    Puiseux f = *this;
    if (!f.prec_ || n < *f.prec_) f.prec_ = n;
    f.erase_from_precision();
    return f;
}

Puiseux Puiseux::exact_truncation(const Rational& n) const {
    Puiseux f;
    for (const auto& [e, c] : terms_) {
        if (!(e < n)) break;
        f.terms_.emplace(e, c);
    }
    return f;
}

Puiseux Puiseux::part_below(const Rational& e) const {
    if (prec_ && *prec_ < e) raise(ErrorKind::PrecisionLoss, "part below exponent beyond precision");
    return exact_truncation(e);
}

Puiseux Puiseux::part_from(const Rational& e) const {
    Puiseux f;
    f.prec_ = prec_;
    for (auto it = terms_.lower_bound(e); it != terms_.end(); ++it) f.terms_.emplace(it->first, it->second);
    return f;
}

Puiseux Puiseux::operator-() const {
    Puiseux f = *this;
    for (auto& [e, c] : f.terms_) c = -c;
    return f;
}

namespace {
std::optional<Rational> min_prec(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
}
}  // namespace

Puiseux operator+(const Puiseux& a, const Puiseux& b) {
    Puiseux f;
    f.prec_ = min_prec(a.prec_, b.prec_);
    f.terms_ = a.terms_;
    for (const auto& [e, c] : b.terms_) {
        auto it = f.terms_.find(e);
        if (it == f.terms_.end()) {
            f.terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) f.terms_.erase(it);
        }
    }
    f.erase_from_precision();
    return f;
}

Puiseux operator-(const Puiseux& a, const Puiseux& b) { return a + (-b); }

Puiseux operator*(const Puiseux& a, const Puiseux& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return Puiseux();
    Puiseux f;
    if (a.prec_) f.prec_ = *a.prec_ + b.valuation_lower_bound();
    if (b.prec_) f.prec_ = min_prec(f.prec_, std::optional<Rational>(*b.prec_ + a.valuation_lower_bound()));
    for (const auto& [ea, ca] : a.terms_) {
        if (f.prec_ && !(ea + b.valuation_lower_bound() < *f.prec_)) break;
        for (const auto& [eb, cb] : b.terms_) {
            Rational e = ea + eb;
            if (f.prec_ && !(e < *f.prec_)) break;
            auto it = f.terms_.find(e);
            if (it == f.terms_.end())
                f.terms_.emplace(std::move(e), ca * cb);
            else
                it->second += ca * cb;
        }
    }
    for (auto it = f.terms_.begin(); it != f.terms_.end();) {
        if (it->second.is_zero())
            it = f.terms_.erase(it);
        else
            ++it;
    }
    return f;
}

Puiseux operator*(const Alg& c, const Puiseux& a) {
    if (c.is_zero()) return a.is_exact() ? Puiseux() : Puiseux::big_o(*a.prec_);
    Puiseux f = a;
    for (auto& [e, x] : f.terms_) x = c * x;
    return f;
}

Puiseux Puiseux::shift(const Rational& s) const {
    Puiseux f;
    if (prec_) f.prec_ = *prec_ + s;
    for (const auto& [e, c] : terms_) f.terms_.emplace(e + s, c);
    return f;
}

Puiseux Puiseux::inverse(const Rational& target) const {
    if (terms_.empty()) raise(ErrorKind::DivisionByZeroSeries, "inverse of a zero series");
    const Rational v = terms_.begin()->first;
    const Alg c0 = terms_.begin()->second;
    const Alg c0inv = c0.inverse();
    // Result precision.
    Rational n = target;
    if (prec_) n = std::min(n, Rational(*prec_ - 2 * v));
    if (terms_.size() == 1 && !prec_) return monomial(c0inv, -v);
    // u = f / (c0 z^v) - 1 has positive exponents on the lattice (1/k)Z.
    const long k = ramification();
    std::vector<std::pair<long, Alg>> u;  // (index m >= 1, coefficient), exponent m/k
    for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it) {
        Rational m = (it->first - v) * k;
        u.emplace_back(to_long(m), it->second * c0inv);
    }
    // Relative precision window: indices n with -v + n/k < n.
    Rational span = (n + v) * k;
    long count = to_long(ceil_of(span));
    std::vector<Alg> h(static_cast<std::size_t>(std::max(count, 0L)), Alg(0));
    if (count > 0) h[0] = Alg(1);
    for (long i = 1; i < count; ++i) {
        Alg s(0);
        for (const auto& [m, cu] : u) {
            if (m > i) break;
            const Alg& prev = h[static_cast<std::size_t>(i - m)];
            if (!prev.is_zero()) s += cu * prev;
        }
        h[static_cast<std::size_t>(i)] = -s;
    }
    Puiseux f;
    f.prec_ = n;
    for (long i = 0; i < count; ++i) {
        const Alg& x = h[static_cast<std::size_t>(i)];
        if (x.is_zero()) continue;
        f.terms_.emplace(-v + make_rational(i, k), x * c0inv);
    }
    f.erase_from_precision();
    return f;
}

Puiseux Puiseux::substitute(const Rational& m) const {
    require(sgn(m) > 0, ErrorKind::InvalidArgument, "Mahler substitution needs a positive exponent factor");
    Puiseux f;
    if (prec_) f.prec_ = *prec_ * m;
    for (const auto& [e, c] : terms_) f.terms_.emplace(e * m, c);
    return f;
}

Puiseux Puiseux::sigma(long j, long p) const { return j == 0 ? *this : substitute(p_power(p, j)); }

bool Puiseux::agrees_with(const Puiseux& other) const {
    Puiseux d = *this - other;
    return d.is_zero();
}

std::string Puiseux::to_string() const {
    std::string out;
    for (const auto& [e, c] : terms_) {
        std::string cs = c.to_string();
        bool neg = c.is_rational() && sgn(c.rational()) < 0;
        if (neg) cs = mahler::to_string(Rational(-c.rational()));
        if (!c.is_rational()) cs = "(" + cs + ")";
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit = c.is_rational() && abs(c.rational()) == 1;
        if (sgn(e) == 0) {
            out += cs;
            continue;
        }
        if (!unit) out += cs + "*";
        out += "z";
        if (e != 1) {
            if (is_integer(e))
                out += "^" + mahler::to_string(e);
            else
                out += "^(" + mahler::to_string(e) + ")";
        }
    }
    if (prec_) {
        std::string o = "O(z^";
        o += is_integer(*prec_) ? mahler::to_string(*prec_) : "(" + mahler::to_string(*prec_) + ")";
        o += ")";
        out += out.empty() ? o : " + " + o;
    }
    return out.empty() ? "0" : out;
}

std::string TruncatedHahn::to_string() const {
    Puiseux::Terms t;
    for (const auto& [e, c] : terms) t.emplace(e, c);
    return Puiseux::from_terms(std::move(t)).to_string();
}

}  // namespace mahler
