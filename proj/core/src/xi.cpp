#include "mahler/xi.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace mahler {

namespace {

Alg int_pow(long k, long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k), static_cast<unsigned long>(e));
    if (k < 0 && e % 2 == 1) r = -r;
    return Alg(r);
}

// k^e with the convention 0^0 = 1.
Alg signed_pow(long k, long e) {
    if (e == 0) return Alg(1);
    return int_pow(k, e);
}

Alg binom(long n, long k) { return Alg(binomial(n, k)); }

int compare_rational(const Rational& x, const Rational& y) {
    int c = cmp(x, y);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

// ---------------------------------------------------------------- XiIndex

XiIndex::XiIndex(std::vector<int> alpha_, std::vector<Alg> lambda_, std::vector<Rational> a_)
    : alpha(std::move(alpha_)), lambda(std::move(lambda_)), a(std::move(a_)) {
    require(alpha.size() == lambda.size() && alpha.size() == a.size(), ErrorKind::InvalidArgument,
            "xi index components must have equal lengths");
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        require(alpha[i] >= 0, ErrorKind::InvalidArgument, "xi index alpha entries must be nonnegative");
        require(!lambda[i].is_zero(), ErrorKind::InvalidArgument, "xi index lambda entries must be nonzero");
        require(sgn(a[i]) > 0, ErrorKind::InvalidArgument, "xi index a entries must be positive");
    }
}

XiIndex XiIndex::tail() const {
    XiIndex w;
    if (empty()) return w;
    w.alpha.assign(alpha.begin() + 1, alpha.end());
    w.lambda.assign(lambda.begin() + 1, lambda.end());
    w.a.assign(a.begin() + 1, a.end());
    return w;
}

Alg XiIndex::lambda_product() const {
    Alg r(1);
    for (const auto& l : lambda) r *= l;
    return r;
}

Rational XiIndex::a_sum() const {
    Rational s = 0;
    for (const auto& x : a) s += x;
    return s;
}

bool XiIndex::is_standard(long p) const {
    for (const auto& x : a)
        if (padic_valuation(x, p) != 0) return false;
    return true;
}

XiIndex XiIndex::with_first(int alpha1, const Alg& lambda1, const Rational& a1) const {
    XiIndex w;
    w.alpha.push_back(alpha1);
    w.lambda.push_back(lambda1);
    w.a.push_back(a1);
    w.alpha.insert(w.alpha.end(), alpha.begin(), alpha.end());
    w.lambda.insert(w.lambda.end(), lambda.begin(), lambda.end());
    w.a.insert(w.a.end(), a.begin(), a.end());
    return w;
}

XiIndex XiIndex::with_alpha1(int alpha1) const {
    XiIndex w = *this;
    w.alpha[0] = alpha1;
    return w;
}

int XiIndex::compare(const XiIndex& o) const {
    if (length() != o.length()) return length() < o.length() ? -1 : 1;
    for (std::size_t i = 0; i < length(); ++i) {
        if (alpha[i] != o.alpha[i]) return alpha[i] < o.alpha[i] ? -1 : 1;
        if (int c = lambda[i].compare(o.lambda[i])) return c;
        if (int c = compare_rational(a[i], o.a[i])) return c;
    }
    return 0;
}

std::string XiIndex::to_string() const {
    std::string s = "xi[alpha=(";
    for (std::size_t i = 0; i < length(); ++i) s += (i ? "," : "") + std::to_string(alpha[i]);
    s += "); lambda=(";
    for (std::size_t i = 0; i < length(); ++i) s += (i ? "," : "") + lambda[i].to_string();
    s += "); a=(";
    for (std::size_t i = 0; i < length(); ++i) s += (i ? "," : "") + mahler::to_string(a[i]);
    return s + ")]";
}

// ---------------------------------------------------------------- XiExpr

XiExpr::XiExpr(const Puiseux& f) {
    if (!f.is_exact_zero()) terms_.emplace(XiIndex(), f);
}

XiExpr XiExpr::xi(const XiIndex& w, const Puiseux& coef) {
    XiExpr e;
    e.add(w, coef);
    return e;
}

void XiExpr::add(const XiIndex& w, const Puiseux& coef) {
    if (coef.is_exact_zero()) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, coef);
        return;
    }
    it->second += coef;
    if (it->second.is_exact_zero()) terms_.erase(it);
}

void XiExpr::add(const XiExpr& e) {
    for (const auto& [w, f] : e.terms_) add(w, f);
}

Puiseux XiExpr::coefficient(const XiIndex& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Puiseux() : it->second;
}

bool XiExpr::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_zero(); });
}

bool XiExpr::is_exact() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_exact(); });
}

std::optional<Rational> XiExpr::precision() const {
    std::optional<Rational> lo;
    for (const auto& [w, f] : terms_)
        if (f.precision() && (!lo || *f.precision() < *lo)) lo = *f.precision();
    return lo;
}

bool XiExpr::is_standard(long p) const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first.is_standard(p); });
}

int XiExpr::filtration_degree() const {
    int d = 0;
    for (const auto& [w, f] : terms_)
        if (!f.is_zero()) d = std::max(d, static_cast<int>(w.length()));
    return d;
}

XiExpr XiExpr::operator-() const {
    XiExpr e = *this;
    for (auto& [w, f] : e.terms_) f = -f;
    return e;
}

XiExpr operator+(const XiExpr& x, const XiExpr& y) {
    XiExpr e = x;
    e.add(y);
    return e;
}

XiExpr operator-(const XiExpr& x, const XiExpr& y) { return x + (-y); }

XiExpr operator*(const Puiseux& f, const XiExpr& x) {
    XiExpr e;
    if (f.is_exact_zero()) return e;
    for (const auto& [w, g] : x.terms_) e.add(w, f * g);
    return e;
}

XiExpr XiExpr::truncated(const Rational& n) const {
    XiExpr e;
    for (const auto& [w, f] : terms_) e.terms_.emplace(w, f.is_exact() ? f : f.truncated(n));
    return e;
}

std::string XiExpr::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [w, f] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + f.to_string() + ")";
        if (!w.empty()) s += "*" + w.to_string();
    }
    return s;
}

// ---------------------------------------------------------------- GeneralizedSeries

GeneralizedSeries GeneralizedSeries::single(const Alg& c, int j, const XiExpr& x) {
    GeneralizedSeries g;
    g.add({c, j}, x);
    return g;
}

void GeneralizedSeries::add(const ExpLogKey& key, const XiExpr& x) {
    require(!key.c.is_zero() && key.j >= 0, ErrorKind::InvalidArgument, "invalid exponential/logarithm label");
    if (x.is_exact_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, x);
        return;
    }
    it->second.add(x);
    if (it->second.is_exact_zero()) terms_.erase(it);
}

void GeneralizedSeries::add(const GeneralizedSeries& g) {
    for (const auto& [k, x] : g.terms_) add(k, x);
}

XiExpr GeneralizedSeries::part(const Alg& c, int j) const {
    auto it = terms_.find({c, j});
    return it == terms_.end() ? XiExpr() : it->second;
}

bool GeneralizedSeries::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_zero(); });
}

std::optional<Rational> GeneralizedSeries::precision() const {
    std::optional<Rational> lo;
    for (const auto& [k, x] : terms_) {
        auto pr = x.precision();
        if (pr && (!lo || *pr < *lo)) lo = pr;
    }
    return lo;
}

GeneralizedSeries operator+(const GeneralizedSeries& x, const GeneralizedSeries& y) {
    GeneralizedSeries g = x;
    g.add(y);
    return g;
}

GeneralizedSeries operator-(const GeneralizedSeries& x, const GeneralizedSeries& y) {
    return x + Puiseux(-1) * y;
}

GeneralizedSeries operator*(const Puiseux& f, const GeneralizedSeries& x) {
    GeneralizedSeries g;
    for (const auto& [k, e] : x.terms_) g.add(k, f * e);
    return g;
}

std::string GeneralizedSeries::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [k, e] : terms_) {
        if (!s.empty()) s += " ; ";
        s += "[c=" + k.c.to_string() + ", j=" + std::to_string(k.j) + "] { " + e.to_string() + " }";
    }
    return s;
}

// ---------------------------------------------------------------- shifts

namespace {

struct ShiftKey {
    XiIndex w;
    long j, p;
    friend bool operator<(const ShiftKey& x, const ShiftKey& y) {
        if (x.p != y.p) return x.p < y.p;
        if (x.j != y.j) return x.j < y.j;
        return x.w < y.w;
    }
};

thread_local std::map<ShiftKey, XiExpr> shift_cache;

XiExpr shift_plus_one(const XiIndex& w, long p) {
    (void)p;
    if (w.empty()) return XiExpr(Puiseux(1));
    const Alg lam = w.lambda_product();
    const int a1 = w.alpha[0];
    XiExpr e;
    e.add(w, Puiseux(lam));
    e.add(w.tail(), Puiseux::monomial(lam, -w.a[0]));
    for (int i = 0; i < a1; ++i) e.add(w.with_alpha1(i), Puiseux(lam * binom(a1, i)));
    return e;
}

XiExpr shift_minus_one(const XiIndex& w, long p) {
    if (w.empty()) return XiExpr(Puiseux(1));
    const Alg inv = w.lambda_product().inverse();
    const int a1 = w.alpha[0];
    XiExpr e;
    for (int i = 0; i <= a1; ++i) {
        Alg c = inv * binom(a1, i);
        if ((a1 - i) % 2 == 1) c = -c;
        e.add(w.with_alpha1(i), Puiseux(c));
    }
    if (a1 == 0) {
        XiExpr t = xi_shift(w.tail(), -1, p);
        e.add(Puiseux::monomial(Alg(-1), -w.a[0] / p) * t);
    }
    return e;
}

}  // namespace

XiExpr xi_shift(const XiIndex& w, long j, long p) {
    if (j == 0 || w.empty()) return XiExpr::xi(w);
    ShiftKey key{w, j, p};
    auto it = shift_cache.find(key);
    if (it != shift_cache.end()) return it->second;
    XiExpr out;
    if (j == 1)
        out = shift_plus_one(w, p);
    else if (j == -1)
        out = shift_minus_one(w, p);
    else
        out = sigma(xi_shift(w, j > 0 ? j - 1 : j + 1, p), j > 0 ? 1 : -1, p);
    shift_cache.emplace(std::move(key), out);
    return out;
}

XiExpr sigma(const XiExpr& x, long j, long p) {
    if (j == 0) return x;
    XiExpr out;
    for (const auto& [w, f] : x.terms()) out.add(f.sigma(j, p) * xi_shift(w, j, p));
    return out;
}

GeneralizedSeries sigma(const GeneralizedSeries& g, long j, long p) {
    GeneralizedSeries cur = g;
    const long step = j > 0 ? 1 : -1;
    for (long s = 0; s != j; s += step) {
        GeneralizedSeries next;
        for (const auto& [k, x] : cur.terms()) {
            XiExpr sx = sigma(x, step, p);
            // sigma(e_c l^J) = c e_c (l + 1)^J ; sigma^-1 = c^-1 e_c (l - 1)^J
            const Alg cf = step > 0 ? k.c : k.c.inverse();
            for (int i = 0; i <= k.j; ++i) {
                Alg b = cf * binom(k.j, i);
                if (step < 0 && (k.j - i) % 2 == 1) b = -b;
                next.add({k.c, i}, Puiseux(b) * sx);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------- products

namespace {

using Monomial = std::vector<int>;
using MultiPoly = std::map<Monomial, Rational>;

MultiPoly mul(const MultiPoly& x, const MultiPoly& y) {
    MultiPoly r;
    for (const auto& [mx, cx] : x)
        for (const auto& [my, cy] : y) {
            Monomial m(mx.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = mx[i] + my[i];
            r[m] += cx * cy;
        }
    for (auto it = r.begin(); it != r.end();) it = sgn(it->second) == 0 ? r.erase(it) : std::next(it);
    return r;
}

MultiPoly linear_power(const std::vector<std::pair<std::size_t, Rational>>& form, std::size_t nvars, int e) {
    MultiPoly r{{Monomial(nvars, 0), Rational(1)}};
    MultiPoly lin;
    for (const auto& [v, c] : form) {
        Monomial m(nvars, 0);
        m[v] = 1;
        lin[m] += c;
    }
    for (int i = 0; i < e; ++i) r = mul(r, lin);
    return r;
}

XiExpr from_multipoly(const MultiPoly& mp, const XiIndex& w) {
    XiExpr e;
    for (const auto& [m, c] : mp) {
        XiIndex v = w;
        v.alpha = m;
        e.add(v, Puiseux(Alg(c)));
    }
    return e;
}

struct Letter {
    int alpha;
    Alg lambda;
    Rational a;
};

std::vector<Letter> letters(const XiIndex& w) {
    std::vector<Letter> out;
    for (std::size_t i = 0; i < w.length(); ++i) out.push_back({w.alpha[i], w.lambda[i], w.a[i]});
    return out;
}

XiIndex from_letters(const std::vector<Letter>& ls) {
    XiIndex w;
    for (const auto& l : ls) {
        w.alpha.push_back(l.alpha);
        w.lambda.push_back(l.lambda);
        w.a.push_back(l.a);
    }
    return w;
}

// Quasi-shuffle of two words; merged letters add alpha and a, multiply lambda.
void stuffle(const std::vector<Letter>& u, std::size_t i, const std::vector<Letter>& v, std::size_t j,
             std::vector<Letter>& prefix, std::map<XiIndex, Integer>& out) {
    if (i == u.size() || j == v.size()) {
        std::vector<Letter> w = prefix;
        w.insert(w.end(), u.begin() + static_cast<long>(i), u.end());
        w.insert(w.end(), v.begin() + static_cast<long>(j), v.end());
        out[from_letters(w)] += 1;
        return;
    }
    prefix.push_back(u[i]);
    stuffle(u, i + 1, v, j, prefix, out);
    prefix.back() = v[j];
    stuffle(u, i, v, j + 1, prefix, out);
    prefix.back() = {u[i].alpha + v[j].alpha, u[i].lambda * v[j].lambda, u[i].a + v[j].a};
    stuffle(u, i + 1, v, j + 1, prefix, out);
    prefix.pop_back();
}

}  // namespace

XiExpr xi_to_tilde(const XiIndex& w) {
    const std::size_t t = w.length();
    MultiPoly acc{{Monomial(t, 0), Rational(1)}};
    for (std::size_t j = 0; j < t; ++j) {
        std::vector<std::pair<std::size_t, Rational>> form{{j, Rational(1)}};
        if (j > 0) form.emplace_back(j - 1, Rational(-1));
        acc = mul(acc, linear_power(form, t, w.alpha[j]));
    }
    return from_multipoly(acc, w);
}

XiExpr tilde_to_xi(const XiIndex& w) {
    const std::size_t t = w.length();
    MultiPoly acc{{Monomial(t, 0), Rational(1)}};
    for (std::size_t j = 0; j < t; ++j) {
        std::vector<std::pair<std::size_t, Rational>> form;
        for (std::size_t i = 0; i <= j; ++i) form.emplace_back(i, Rational(1));
        acc = mul(acc, linear_power(form, t, w.alpha[j]));
    }
    return from_multipoly(acc, w);
}

XiExpr xi_multiply(const XiExpr& x, const XiExpr& y, long p) {
    (void)p;
    XiExpr out;
    for (const auto& [w1, f1] : x.terms()) {
        XiExpr t1 = xi_to_tilde(w1);
        for (const auto& [w2, f2] : y.terms()) {
            Puiseux f = f1 * f2;
            if (f.is_exact_zero()) continue;
            XiExpr t2 = xi_to_tilde(w2);
            XiExpr prod_tilde;
            for (const auto& [u, cu] : t1.terms()) {
                auto lu = letters(u);
                for (const auto& [v, cv] : t2.terms()) {
                    std::map<XiIndex, Integer> words;
                    std::vector<Letter> prefix;
                    stuffle(lu, 0, letters(v), 0, prefix, words);
                    for (const auto& [word, mult] : words) prod_tilde.add(word, Puiseux(Alg(mult)) * (cu * cv));
                }
            }
            for (const auto& [u, cu] : prod_tilde.terms()) out.add((f * cu) * tilde_to_xi(u));
        }
    }
    return out;
}

// ---------------------------------------------------------------- sigma^-1 sums

namespace {

// U with lam U(K+1) - U(K) = K^beta.
AlgPoly solve_difference(const Alg& lam, int beta) {
    if (lam.is_one()) {
        std::vector<Alg> u(static_cast<std::size_t>(beta + 2), Alg(0));
        for (int i = beta; i >= 0; --i) {
            Alg rhs = (i == beta) ? Alg(1) : Alg(0);
            for (int m = i + 2; m <= beta + 1; ++m) rhs -= u[static_cast<std::size_t>(m)] * binom(m, i);
            u[static_cast<std::size_t>(i + 1)] = rhs / Alg(i + 1);
        }
        return AlgPoly(std::move(u));
    }
    std::vector<Alg> u(static_cast<std::size_t>(beta + 1), Alg(0));
    const Alg denom = (lam - Alg(1)).inverse();
    for (int i = beta; i >= 0; --i) {
        Alg rhs = (i == beta) ? Alg(1) : Alg(0);
        for (int m = i + 1; m <= beta; ++m) rhs -= lam * u[static_cast<std::size_t>(m)] * binom(m, i);
        u[static_cast<std::size_t>(i)] = rhs * denom;
    }
    return AlgPoly(std::move(u));
}

XiIndex with_lambda1(const XiIndex& w, int alpha1, const Alg& lambda1) {
    XiIndex v = w;
    v.alpha[0] = alpha1;
    v.lambda[0] = lambda1;
    return v;
}

// sum_{k>=1} k^alpha c^k sigma^{-k}(xi_w), t >= 1.
XiExpr sigma_inverse_sum_bare(int alpha, const Alg& c, const XiIndex& w) {
    const Alg lam = w.lambda_product();
    const Alg l0 = c / lam;
    const int a1 = w.alpha[0];
    AlgPoly pk, qk;
    for (int j = 0; j <= a1; ++j) {
        Alg cj = binom(a1, j);
        if ((a1 - j) % 2 == 1) cj = -cj;
        AlgPoly u = solve_difference(l0, alpha + a1 - j);
        AlgPoly kj = AlgPoly::monomial(Alg(1), j);
        pk = pk + cj * (kj * u);
        qk = qk + (-(cj * l0 * u(Alg(1)))) * kj;
    }
    XiExpr out;
    for (int m = 0; m <= pk.degree(); ++m)
        if (!pk.coeff(m).is_zero()) out.add(with_lambda1(w, m, l0 * w.lambda[0]), Puiseux(pk.coeff(m)));
    for (int m = 0; m <= qk.degree(); ++m)
        if (!qk.coeff(m).is_zero()) out.add(with_lambda1(w, m, w.lambda[0]), Puiseux(qk.coeff(m)));
    return out;
}

}  // namespace

XiExpr xi_sigma_inverse_sum(int alpha, const Alg& c, const XiExpr& h, long p) {
    (void)p;
    require(!c.is_zero(), ErrorKind::InvalidArgument, "sigma-inverse sum needs c != 0");
    require(alpha >= 0, ErrorKind::InvalidArgument, "sigma-inverse sum needs alpha >= 0");
    XiExpr out;
    for (const auto& [w, f] : h.terms()) {
        require(f.is_exact(), ErrorKind::PrecisionLoss, "sigma-inverse sum of a truncated coefficient");
        for (const auto& [e, beta] : f.terms()) {
            const Rational gamma = -e;
            if (sgn(gamma) > 0) {
                out.add(w.with_first(alpha, c / w.lambda_product(), gamma), Puiseux(beta));
            } else if (sgn(gamma) == 0) {
                require(!w.empty(), ErrorKind::InvalidArgument, "sigma-inverse sum of a constant diverges");
                out.add(Puiseux(beta) * sigma_inverse_sum_bare(alpha, c, w));
            } else {
                raise(ErrorKind::InvalidArgument, "sigma-inverse sum of a positive power of z diverges");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- standardization

namespace {

struct StdKey {
    XiIndex w;
    long p;
    friend bool operator<(const StdKey& x, const StdKey& y) { return x.p != y.p ? x.p < y.p : x.w < y.w; }
};
struct SumKey {
    int alpha;
    Alg lambda;
    Rational g;
    XiIndex w;
    long p;
    friend bool operator<(const SumKey& x, const SumKey& y) {
        if (x.p != y.p) return x.p < y.p;
        if (x.alpha != y.alpha) return x.alpha < y.alpha;
        if (int c = x.lambda.compare(y.lambda)) return c < 0;
        if (int c = cmp(x.g, y.g)) return c < 0;
        return x.w < y.w;
    }
};

thread_local std::map<StdKey, XiExpr> std_cache;
thread_local std::map<SumKey, XiExpr> sum_cache;
thread_local long std_budget = 0;

void spend() {
    if (--std_budget < 0)
        raise(ErrorKind::RecursionBudgetExceeded, "standardization exceeded its recursion budget");
}

XiExpr std_index(const XiIndex& w, long p);

// sum_{k>=1} k^alpha lam^k sigma^{-k}(z^{-g} xi_w) with w standard, in standard form.
XiExpr std_sum(int alpha, const Alg& lam, const Rational& g, const XiIndex& w, long p) {
    spend();
    SumKey key{alpha, lam, g, w, p};
    if (auto it = sum_cache.find(key); it != sum_cache.end()) return it->second;
    Rational eta;
    long u = 0;
    split_p_power(g, p, eta, u);
    XiExpr out;
    if (u == 0) {
        out.add(w.with_first(alpha, lam / w.lambda_product(), g), Puiseux(1));
    } else if (u > 0) {
        for (long k = 1; k <= u; ++k) {
            Alg c = int_pow(k, alpha) * lam.pow(k);
            out.add(Puiseux::monomial(c, -eta * pow(Rational(p), u - k)) * xi_shift(w, -k, p));
        }
        XiExpr back = xi_shift(w, -u, p);
        const Alg lu = lam.pow(u);
        for (const auto& [wi, fi] : back.terms())
            for (const auto& [e, ci] : fi.terms())
                for (int j = 0; j <= alpha; ++j) {
                    Alg coef = binom(alpha, j) * int_pow(u, alpha - j) * lu * ci;
                    out.add(Puiseux(coef) * std_sum(j, lam, eta - e, wi, p));
                }
    } else {
        const long v = -u;
        XiExpr fwd = xi_shift(w, v, p);
        const Alg lv = lam.pow(-v);
        for (const auto& [wi, di] : fwd.terms())
            for (const auto& [e, d] : di.terms())
                for (int j = 0; j <= alpha; ++j) {
                    Alg coef = lv * binom(alpha, j) * signed_pow(-v, alpha - j) * d;
                    out.add(Puiseux(coef) * std_sum(j, lam, eta - e, wi, p));
                }
        for (long m = 1; m <= v; ++m) {
            Alg c = signed_pow(m - v, alpha);
            if (c.is_zero()) continue;
            c *= lam.pow(m - v);
            out.add(Puiseux::monomial(-c, -eta / pow(Rational(p), m)) * xi_shift(w, v - m, p));
        }
    }
    sum_cache.emplace(std::move(key), out);
    return out;
}

XiExpr std_index(const XiIndex& w, long p) {
    if (w.is_standard(p)) return XiExpr::xi(w);
    StdKey key{w, p};
    if (auto it = std_cache.find(key); it != std_cache.end()) return it->second;
    spend();
    XiExpr inner = std_index(w.tail(), p);
    const Alg lam = w.lambda_product();
    XiExpr out;
    for (const auto& [wi, fi] : inner.terms())
        for (const auto& [e, c] : fi.terms()) {
            Rational g = w.a[0] - e;
            require(sgn(g) > 0, ErrorKind::InvalidArgument, "standardization met a non-negative exponent");
            out.add(Puiseux(c) * std_sum(w.alpha[0], lam, g, wi, p));
        }
    std_cache.emplace(std::move(key), out);
    return out;
}

}  // namespace

XiExpr standardize(const XiIndex& w, long p, const StandardizeOptions& opt) {
    std_budget = opt.budget;
    return std_index(w, p);
}

XiExpr standardize(const XiExpr& x, long p, const StandardizeOptions& opt) {
    std_budget = opt.budget;
    XiExpr out;
    for (const auto& [w, f] : x.terms()) {
        if (w.is_standard(p))
            out.add(w, f);
        else
            out.add(f * std_index(w, p));
    }
    return out;
}

GeneralizedSeries standardize(const GeneralizedSeries& g, long p, const StandardizeOptions& opt) {
    GeneralizedSeries out;
    for (const auto& [k, x] : g.terms()) out.add(k, standardize(x, p, opt));
    return out;
}

void clear_xi_caches() {
    shift_cache.clear();
    std_cache.clear();
    sum_cache.clear();
}

// ---------------------------------------------------------------- operators

XiExpr apply_operator(const MahlerOperator& l, const XiExpr& x) {
    XiExpr out;
    for (int i = 0; i <= l.order(); ++i) out.add(l.coeff(i) * sigma(x, i, l.p()));
    return out;
}

GeneralizedSeries apply_operator(const MahlerOperator& l, const GeneralizedSeries& g) {
    GeneralizedSeries out;
    GeneralizedSeries cur = g;
    for (int i = 0; i <= l.order(); ++i) {
        if (i > 0) cur = sigma(cur, 1, l.p());
        out.add(l.coeff(i) * cur);
    }
    return out;
}

MahlerOperator xi_annihilator(const XiIndex& w, long p) {
    if (w.empty()) return MahlerOperator(p, {Puiseux(-1), Puiseux(1)});
    std::vector<XiExpr> orbit{XiExpr::xi(w)};
    for (int m = 1; m <= 64; ++m) {
        orbit.push_back(sigma(orbit.back(), 1, p));
        std::set<XiIndex> idx;
        for (const auto& x : orbit)
            for (const auto& [v, f] : x.terms()) idx.insert(v);
        std::vector<std::vector<Puiseux>> rows;
        for (const auto& x : orbit) {
            std::vector<Puiseux> r;
            for (const auto& v : idx) r.push_back(x.coefficient(v));
            rows.push_back(std::move(r));
        }
        if (generic_rank(rows) < rows.size()) return operator_from_orbit(rows, p);
    }
    raise(ErrorKind::RecursionBudgetExceeded, "annihilator search did not close");
}

// ---------------------------------------------------------------- expansion oracle

namespace {

Alg enumerate_coeff(const XiIndex& w, std::size_t i, long kprev, const Rational& rem, long p,
                    const std::vector<Rational>& suffix) {
    const std::size_t t = w.length();
    Alg total(0);
    long k = kprev + 1;
    Rational pk = pow(Rational(p), k);
    while (w.a[i] / pk > rem) {
        ++k;
        pk *= p;
    }
    for (;; ++k, pk *= p) {
        if (suffix[i] / pk < rem) break;
        const Rational term = w.a[i] / pk;
        Alg weight = signed_pow(k - kprev, w.alpha[i]) * w.lambda[i].pow(k);
        if (i + 1 == t) {
            if (term == rem) total += weight;
            if (term < rem) break;
        } else {
            Rational r2 = rem - term;
            if (sgn(r2) > 0) {
                Alg sub = enumerate_coeff(w, i + 1, k, r2, p, suffix);
                if (!sub.is_zero()) total += weight * sub;
            }
        }
    }
    return total;
}

std::vector<Rational> suffix_sums(const XiIndex& w) {
    std::vector<Rational> s(w.length() + 1, Rational(0));
    for (std::size_t i = w.length(); i-- > 0;) s[i] = s[i + 1] + w.a[i];
    return s;
}

// Bound B with supp(xi_w) in [-B, 0).
Rational support_bound(const XiIndex& w, long p) {
    Rational b = 0;
    Rational pk = 1;
    for (std::size_t i = 0; i < w.length(); ++i) {
        pk *= p;
        b += w.a[i] / pk;
    }
    return b;
}

void enumerate_exponents(const XiIndex& w, std::size_t i, long kprev, const Rational& acc, long p, int depth,
                         std::set<Rational>& out) {
    if (i == w.length()) {
        out.insert(-acc);
        return;
    }
    Rational pk = pow(Rational(p), kprev + 1);
    for (long k = kprev + 1; k <= depth; ++k, pk *= p) enumerate_exponents(w, i + 1, k, acc + w.a[i] / pk, p, depth, out);
}

}  // namespace

Alg xi_coefficient(const XiIndex& w, const Rational& e, long p) {
    if (w.empty()) return sgn(e) == 0 ? Alg(1) : Alg(0);
    if (sgn(e) >= 0) return Alg(0);
    return enumerate_coeff(w, 0, 0, -e, p, suffix_sums(w));
}

bool xi_coefficient_known(const XiExpr& x, const Rational& e) {
    for (const auto& [w, f] : x.terms()) {
        if (!f.precision()) continue;
        // Needs f below e + B; B <= a_sum is a safe bound independent of p.
        if (w.empty()) {
            if (!(e < *f.precision())) return false;
        } else if (!(e + w.a_sum() < *f.precision())) {
            return false;
        }
    }
    return true;
}

Alg xi_coefficient(const XiExpr& x, const Rational& e, long p) {
    Alg total(0);
    for (const auto& [w, f] : x.terms()) {
        if (w.empty()) {
            total += f.coeff(e);
            continue;
        }
        const Rational b = support_bound(w, p);
        if (f.precision() && !(e + b < *f.precision()))
            raise(ErrorKind::PrecisionLoss, "coefficient beyond the known precision of a xi term");
        for (auto it = f.terms().upper_bound(e); it != f.terms().end() && !(it->first > e + b); ++it) {
            Alg c = xi_coefficient(w, e - it->first, p);
            if (!c.is_zero()) total += it->second * c;
        }
    }
    return total;
}

TruncatedHahn xi_expand(const XiIndex& w, const Rational& upper, long p, std::optional<Rational> lower, int depth) {
    TruncatedHahn h;
    h.upper = upper;
    h.lower = lower ? *lower : Rational(-w.a_sum() - 1);
    if (w.empty()) {
        if (!(Rational(0) < h.lower) && !(upper < 0)) h.terms.emplace_back(Rational(0), Alg(1));
        h.complete = true;
        return h;
    }
    int d = depth;
    if (w.length() == 1 && sgn(upper) < 0) {
        // Every exponent -a/p^k <= upper needs p^k <= a/|upper|.
        Rational lim = w.a[0] / (-upper);
        int k = 0;
        Rational pk = 1;
        while (!(pk * p > lim)) {
            pk *= p;
            ++k;
        }
        d = std::max(d, k);
    }
    std::set<Rational> exps;
    enumerate_exponents(w, 0, 0, Rational(0), p, d, exps);
    for (const auto& e : exps) {
        if (e < h.lower || e > upper) continue;
        Alg c = xi_coefficient(w, e, p);
        if (!c.is_zero()) h.terms.emplace_back(e, c);
    }
    h.complete = w.length() <= 1 && sgn(upper) < 0;
    return h;
}

WindowCheck window_compare(const XiExpr& x, const XiExpr& y, long p, const Rational& lower, const Rational& upper,
                           int depth) {
    WindowCheck wc;
    wc.upper_used = upper;
    std::set<Rational> cands;
    auto collect = [&](const XiExpr& e) {
        for (const auto& [w, f] : e.terms()) {
            std::set<Rational> xs;
            if (w.empty())
                xs.insert(Rational(0));
            else
                enumerate_exponents(w, 0, 0, Rational(0), p, depth, xs);
            for (const auto& [fe, c] : f.terms())
                for (const auto& s : xs) {
                    Rational ex = fe + s;
                    if (!(ex < lower) && !(ex > upper)) cands.insert(ex);
                }
        }
    };
    collect(x);
    collect(y);
    for (const auto& e : cands) {
        if (!xi_coefficient_known(x, e) || !xi_coefficient_known(y, e)) {
            if (e < wc.upper_used) wc.upper_used = e;
            continue;
        }
        ++wc.compared;
        if (xi_coefficient(x, e, p) != xi_coefficient(y, e, p)) {
            wc.equal = false;
            wc.mismatch = e;
            return wc;
        }
    }
    return wc;
}

}  // namespace mahler
