#include "mahler/algebraic.hpp"

#include <algorithm>

#include "mahler/factor.hpp"
#include "mahler/matrix.hpp"
#include "mahler/roots.hpp"

namespace mahler {

namespace {

std::vector<Rational> reduce_mod(std::vector<Rational> c, const NumberField& k) {
    const int n = k.degree();
    const auto& table = k.reduction_table();
    if (static_cast<int>(c.size()) > n) {
        std::vector<Rational> out(c.begin(), c.begin() + n);
        for (std::size_t i = static_cast<std::size_t>(n); i < c.size(); ++i) {
            if (is_zero(c[i])) continue;
            const auto& row = table[i - static_cast<std::size_t>(n)];
            for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += c[i] * row[static_cast<std::size_t>(j)];
        }
        c = std::move(out);
    }
    c.resize(static_cast<std::size_t>(n), Rational(0));
    return c;
}

}  // namespace

FieldPtr NumberField::create(const QPoly& modulus, int embedding) {
    require(modulus.degree() >= 2, ErrorKind::InvalidArgument, "number field modulus must have degree >= 2");
    auto roots = isolate_roots(modulus);
    require(embedding >= 0 && embedding < static_cast<int>(roots.size()), ErrorKind::InvalidArgument,
            "embedding index out of range");
    std::shared_ptr<NumberField> k(new NumberField());
    k->modulus_ = modulus.monic();
    k->degree_ = static_cast<int>(modulus.degree());
    k->embedding_ = embedding;
    k->generator_value_ = roots[static_cast<std::size_t>(embedding)].value;
    const int n = k->degree_;
    // x^n = -sum m_i x^i; build x^(n+k) for k = 0..n-2 recursively.
    std::vector<Rational> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = -k->modulus_.coeff(static_cast<std::size_t>(i));
    k->reduction_.push_back(row);
    for (int e = 1; e <= n - 2; ++e) {
        const auto& prev = k->reduction_.back();
        std::vector<Rational> next(static_cast<std::size_t>(n));
        for (int i = n - 1; i >= 1; --i) next[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i - 1)];
        Rational top = prev[static_cast<std::size_t>(n - 1)];
        for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] += top * row[static_cast<std::size_t>(i)];
        k->reduction_.push_back(std::move(next));
    }
    return k;
}

int NumberField::compare(const NumberField& other) const {
    if (degree_ != other.degree_) return degree_ < other.degree_ ? -1 : 1;
    for (int i = 0; i <= degree_; ++i) {
        int c = cmp(modulus_.coeff(static_cast<std::size_t>(i)), other.modulus_.coeff(static_cast<std::size_t>(i)));
        if (c != 0) return c < 0 ? -1 : 1;
    }
    if (embedding_ != other.embedding_) return embedding_ < other.embedding_ ? -1 : 1;
    return 0;
}

std::string NumberField::describe() const {
    return "Q[t]/(" + poly_to_string(modulus_, "t") + "), root " + std::to_string(embedding_);
}

Alg Alg::make(const FieldPtr& field, std::vector<Rational> coords) {
    Alg a;
    if (!field) {
        a.q_ = coords.empty() ? Rational(0) : coords[0];
        return a;
    }
    coords = reduce_mod(std::move(coords), *field);
    bool rational = true;
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (!mahler::is_zero(coords[i])) rational = false;
    if (rational) {
        a.q_ = coords[0];
        return a;
    }
    a.field_ = field;
    a.v_ = std::move(coords);
    return a;
}

Alg Alg::generator(const FieldPtr& field) {
    std::vector<Rational> c(static_cast<std::size_t>(field->degree()));
    c[1] = 1;
    return make(field, std::move(c));
}

Alg Alg::from_coords(const FieldPtr& field, std::vector<Rational> coords) { return make(field, std::move(coords)); }

Alg Alg::from_minpoly(const std::vector<Integer>& poly, int root_index) {
    QPoly f = from_integer_coeffs(poly);
    require(f.degree() >= 1, ErrorKind::InvalidArgument, "minimal polynomial must have positive degree");
    auto all = isolate_roots(squarefree_part(f));
    require(root_index >= 0 && root_index < static_cast<int>(all.size()), ErrorKind::InvalidArgument,
            "root index out of range");
    ComplexLD z = all[static_cast<std::size_t>(root_index)].value;
    QPoly best;
    long double best_val = -1;
    for (const auto& [g, mult] : factor_rational(f)) {
        (void)mult;
        ComplexLD acc(0);
        for (std::size_t i = g.coeffs().size(); i-- > 0;)
            acc = acc * z + ComplexLD(static_cast<long double>(to_double(g.coeffs()[i])));
        long double v = std::abs(acc);
        // Normalize by the size of the polynomial so large factors do not lose.
        long double scale = 0;
        for (const auto& c : g.coeffs()) scale += std::abs(static_cast<long double>(to_double(c)));
        v /= (1 + scale) * std::pow(1 + std::abs(z), static_cast<long double>(g.degree()));
        if (best_val < 0 || v < best_val) {
            best_val = v;
            best = g;
        }
    }
    if (best.degree() == 1) return Alg(Rational(-best.coeff(0) / best.coeff(1)));
    auto roots = isolate_roots(best);
    return generator(NumberField::create(best, nearest_root_index(roots, z)));
}

const Rational& Alg::rational() const {
    require(!field_, ErrorKind::InvalidArgument, "algebraic number is not rational");
    return q_;
}

std::vector<Rational> Alg::coords(int degree) const {
    std::vector<Rational> c(static_cast<std::size_t>(std::max(degree, 1)));
    if (!field_) {
        c[0] = q_;
        return c;
    }
    require(degree >= field_->degree(), ErrorKind::InvalidArgument, "coordinate request below field degree");
    for (std::size_t i = 0; i < v_.size(); ++i) c[i] = v_[i];
    return c;
}

const FieldPtr& common_field(const Alg& a, const Alg& b) {
    if (!a.field_) return b.field_;
    if (!b.field_) return a.field_;
    if (a.field_ == b.field_ || a.field_->same_as(*b.field_)) return a.field_;
    raise(ErrorKind::UnsupportedSplitting, "values from two different number fields: " + a.field_->describe() +
                                               " and " + b.field_->describe());
}

FieldPtr common_field(const std::vector<Alg>& xs) {
    FieldPtr k;
    for (const auto& x : xs) {
        if (!x.field()) continue;
        if (!k) {
            k = x.field();
            continue;
        }
        if (!(k == x.field() || k->same_as(*x.field())))
            raise(ErrorKind::UnsupportedSplitting, "values from two different number fields");
    }
    return k;
}

Alg Alg::operator-() const {
    if (!field_) return Alg(Rational(-q_));
    Alg r = *this;
    for (auto& c : r.v_) c = -c;
    return r;
}

Alg operator+(const Alg& a, const Alg& b) {
    if (!a.field_ && !b.field_) return Alg(Rational(a.q_ + b.q_));
    const FieldPtr& k = common_field(a, b);
    auto x = a.coords(k->degree()), y = b.coords(k->degree());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return Alg::make(k, std::move(x));
}

Alg operator-(const Alg& a, const Alg& b) { return a + (-b); }

Alg operator*(const Alg& a, const Alg& b) {
    if (!a.field_ && !b.field_) return Alg(Rational(a.q_ * b.q_));
    if (!a.field_ || !b.field_) {
        const Alg& f = a.field_ ? a : b;
        const Rational& s = a.field_ ? b.q_ : a.q_;
        if (is_zero(s)) return Alg(0);
        Alg r = f;
        for (auto& c : r.v_) c *= s;
        return r;
    }
    const FieldPtr& k = common_field(a, b);
    const std::size_t n = static_cast<std::size_t>(k->degree());
    std::vector<Rational> prod(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (is_zero(a.v_[i])) continue;
        for (std::size_t j = 0; j < n; ++j) prod[i + j] += a.v_[i] * b.v_[j];
    }
    return Alg::make(k, std::move(prod));
}

Alg Alg::inverse() const {
    require(!is_zero(), ErrorKind::InvalidArgument, "inverse of zero");
    if (!field_) return Alg(Rational(1 / q_));
    QPoly a(v_);
    QPoly s, t;
    QPoly g = poly_xgcd(a, field_->modulus(), s, t);
    require(g.degree() == 0, ErrorKind::InvalidArgument, "element not invertible (modulus not irreducible?)");
    return make(field_, s.coeffs());
}

Alg operator/(const Alg& a, const Alg& b) { return a * b.inverse(); }

Alg Alg::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Alg r(1), base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

int Alg::compare(const Alg& other) const {
    if (!field_ && !other.field_) {
        int c = cmp(q_, other.q_);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (!field_) return -1;
    if (!other.field_) return 1;
    if (field_ != other.field_) {
        int c = field_->compare(*other.field_);
        if (c != 0) return c;
    }
    for (std::size_t i = 0; i < v_.size(); ++i) {
        int c = cmp(v_[i], other.v_[i]);
        if (c != 0) return c < 0 ? -1 : 1;
    }
    return 0;
}

std::vector<std::vector<Rational>> Alg::multiplication_matrix(const FieldPtr& field) const {
    const int n = field ? field->degree() : 1;
    std::vector<std::vector<Rational>> m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    if (!field) {
        m[0][0] = rational();
        return m;
    }
    // Column j = coordinates of this * t^j.
    for (int j = 0; j < n; ++j) {
        std::vector<Rational> e(static_cast<std::size_t>(n));
        e[static_cast<std::size_t>(j)] = 1;
        Alg col = *this * make(field, e);
        auto c = col.coords(n);
        for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(i)];
    }
    return m;
}

namespace {
Matrix<Rational> to_matrix(const std::vector<std::vector<Rational>>& rows) {
    Matrix<Rational> m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    return m;
}
}  // namespace

QPoly Alg::minimal_polynomial() const {
    if (!field_) return QPoly({Rational(-q_), Rational(1)});
    return squarefree_part(charpoly(to_matrix(multiplication_matrix(field_))));
}

std::vector<Integer> Alg::minimal_polynomial_integer() const { return primitive_integer_coeffs(minimal_polynomial()); }

int Alg::degree() const { return field_ ? static_cast<int>(minimal_polynomial().degree()) : 1; }

std::complex<long double> Alg::approx() const {
    if (!field_) return {static_cast<long double>(to_double(q_)), 0.0L};
    std::complex<long double> z = field_->generator_value();
    std::complex<long double> r = 0;
    for (std::size_t i = v_.size(); i-- > 0;) r = r * z + static_cast<long double>(to_double(v_[i]));
    return r;
}

int Alg::root_index() const {
    if (!field_) return 0;
    return nearest_root_index(isolate_roots(minimal_polynomial()), approx());
}

Rational Alg::norm() const {
    if (!field_) return q_;
    return determinant(to_matrix(multiplication_matrix(field_)));
}

Rational Alg::trace() const {
    if (!field_) return q_;
    auto m = multiplication_matrix(field_);
    Rational t = 0;
    for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
    return t;
}

std::string Alg::to_string() const {
    if (!field_) return mahler::to_string(q_);
    return "root(" + poly_to_string(from_integer_coeffs(minimal_polynomial_integer()), "x") + "; " +
           std::to_string(root_index()) + ")";
}

AlgPoly to_alg_poly(const QPoly& f) {
    std::vector<Alg> c;
    for (const auto& x : f.coeffs()) c.emplace_back(x);
    return AlgPoly(std::move(c));
}

std::optional<QPoly> to_rational_poly(const AlgPoly& f) {
    std::vector<Rational> c;
    for (const auto& x : f.coeffs()) {
        if (!x.is_rational()) return std::nullopt;
        c.push_back(x.rational());
    }
    return QPoly(std::move(c));
}

std::string alg_to_json_string(const Alg& a) { return a.to_string(); }

}  // namespace mahler
