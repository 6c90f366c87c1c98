#include "mahler/io.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace mahler {

namespace {

[[noreturn]] void parse_fail(const std::string& text, std::size_t pos, const std::string& what) {
    raise(ErrorKind::ParseError, what + " at offset " + std::to_string(pos) + " in \"" + text + "\"");
}

// Splits at `sep` outside (), [] and {}.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[' || ch == '{') ++depth;
        if (ch == ')' || ch == ']' || ch == '}') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<Alg> as_constant(const XiExpr& x) {
    if (x.is_exact_zero()) return Alg(0);
    if (x.terms().size() != 1 || !x.terms().begin()->first.empty()) return std::nullopt;
    const Puiseux& f = x.terms().begin()->second;
    if (!f.is_exact() || f.terms().size() != 1 || f.terms().begin()->first != 0) return std::nullopt;
    return f.terms().begin()->second;
}

std::optional<Puiseux> as_series(const XiExpr& x) {
    if (x.is_exact_zero()) return Puiseux();
    if (x.terms().size() != 1 || !x.terms().begin()->first.empty()) return std::nullopt;
    return x.terms().begin()->second;
}

// Polynomial in M whose coefficients are xi expressions (pure series when M occurs).
using Value = std::map<int, XiExpr>;

void clean(Value& v) {
    for (auto it = v.begin(); it != v.end();)
        it = it->second.is_exact_zero() ? v.erase(it) : std::next(it);
}

bool m_free(const Value& v) { return v.empty() || (v.size() == 1 && v.begin()->first == 0); }

XiExpr scalar_part(const Value& v) {
    auto it = v.find(0);
    return it == v.end() ? XiExpr() : it->second;
}

class Parser {
public:
    Parser(const std::string& text, long p, bool allow_m, bool allow_xi, char var = 'z')
        : s_(text), p_(p), allow_m_(allow_m), allow_xi_(allow_xi), var_(var) {}

    Value parse_all() {
        Value v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { parse_fail(s_, pos_, what); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    bool starts_with(const std::string& w) {
        skip();
        return s_.compare(pos_, w.size(), w) == 0;
    }

    Value expr() {
        Value v;
        if (accept('-'))
            v = neg(term());
        else {
            accept('+');
            v = term();
        }
        for (;;) {
            if (accept('+'))
                v = add(v, term());
            else if (accept('-'))
                v = add(v, neg(term()));
            else
                return v;
        }
    }

    Value term() {
        Value v = unary();
        for (;;) {
            if (accept('*'))
                v = mul(v, unary());
            else if (accept('/'))
                v = divide(v, unary());
            else
                return v;
        }
    }

    Value unary() {
        if (accept('-')) return neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    Value power() {
        skip();
        const std::size_t base_pos = pos_;
        Value base = primary();
        if (!accept('^')) return base;
        Rational e = exponent();
        if (is_integer(e) && e >= 0) {
            Value r = constant_value(Alg(1));
            long n = to_long(e);
            for (long i = 0; i < n; ++i) r = mul(r, base);
            return r;
        }
        // Negative or fractional exponents: monomials only.
        auto f = m_free(base) ? as_series(scalar_part(base)) : std::nullopt;
        if (!f || !f->is_exact() || f->terms().size() != 1)
            parse_fail(s_, base_pos, "non-integer or negative power of a non-monomial");
        const auto& [ex, c] = *f->terms().begin();
        Alg coef;
        if (is_integer(e))
            coef = c.pow(to_long(e));
        else if (c.is_one())
            coef = Alg(1);
        else
            parse_fail(s_, base_pos, "fractional power of a non-unit coefficient");
        return series_value(Puiseux::monomial(coef, ex * e));
    }

    Rational exponent() {
        skip();
        bool negative = false;
        if (accept('-')) negative = true;
        Rational r;
        if (accept('(')) {
            Value v = expr();
            expect(')');
            auto c = m_free(v) ? as_constant(scalar_part(v)) : std::nullopt;
            if (!c || !c->is_rational()) fail("exponent must be a rational number");
            r = c->rational();
        } else {
            r = Rational(integer());
        }
        return negative ? Rational(-r) : r;
    }

    Integer integer() {
        skip();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) fail("expected a number");
        return Integer(s_.substr(b, pos_ - b));
    }

    Value primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char ch = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch))) return constant_value(Alg(integer()));
        if (accept('(')) {
            Value v = expr();
            expect(')');
            return v;
        }
        if (starts_with("root(")) {
            pos_ += 5;
            return constant_value(root_literal());
        }
        if (allow_xi_ && starts_with("xi[")) {
            std::size_t b = pos_;
            int depth = 0;
            for (; pos_ < s_.size(); ++pos_) {
                if (s_[pos_] == '[') ++depth;
                if (s_[pos_] == ']' && --depth == 0) break;
            }
            if (pos_ >= s_.size()) fail("unterminated xi index");
            ++pos_;
            Value v;
            v[0] = XiExpr::xi(parse_xi_index(s_.substr(b, pos_ - b)));
            return v;
        }
        if (starts_with("O(")) {
            pos_ += 2;
            Value v = expr();
            expect(')');
            auto f = m_free(v) ? as_series(scalar_part(v)) : std::nullopt;
            if (!f || !f->is_exact() || f->terms().size() != 1 || !f->terms().begin()->second.is_one())
                fail("O(...) expects a monomial z^N");
            return series_value(Puiseux::big_o(f->terms().begin()->first));
        }
        if (ch == var_) {
            ++pos_;
            return series_value(Puiseux::monomial(Alg(1), Rational(1)));
        }
        if (allow_m_ && ch == 'M') {
            ++pos_;
            Value v;
            v[1] = XiExpr(Puiseux(1));
            return v;
        }
        fail("unexpected character '" + std::string(1, ch) + "'");
    }

    // root(<poly in x>; k) or root(<poly in x>, k)
    Alg root_literal() {
        std::size_t b = pos_;
        int depth = 1;
        std::size_t sep = std::string::npos;
        for (; pos_ < s_.size(); ++pos_) {
            char c = s_[pos_];
            if (c == '(') ++depth;
            if (c == ')' && --depth == 0) break;
            if ((c == ';' || c == ',') && depth == 1) sep = pos_;
        }
        if (pos_ >= s_.size() || sep == std::string::npos) fail("malformed root(poly; index)");
        std::string poly_text = s_.substr(b, sep - b);
        std::string index_text = trim(s_.substr(sep + 1, pos_ - sep - 1));
        ++pos_;
        Parser inner(poly_text, p_, false, false, 'x');
        Value pv = inner.parse_all();
        auto f = as_series(scalar_part(pv));
        if (!m_free(pv) || !f || !f->is_exact()) fail("root(...) expects a polynomial in x");
        std::map<long, Rational> coeffs;
        Integer den = 1;
        for (const auto& [e, c] : f->terms()) {
            if (!is_integer(e) || e < 0 || !c.is_rational()) fail("root(...) expects a rational polynomial in x");
            coeffs[to_long(e)] = c.rational();
            den = lcm(den, c.rational().get_den());
        }
        if (coeffs.empty() || coeffs.rbegin()->first < 1) fail("root(...) needs a nonconstant polynomial");
        std::vector<Integer> ints(static_cast<std::size_t>(coeffs.rbegin()->first + 1), Integer(0));
        for (const auto& [k, c] : coeffs) {
            Rational v = c * den;
            ints[static_cast<std::size_t>(k)] = v.get_num();
        }
        int index = 0;
        try {
            index = static_cast<int>(to_long(parse_rational(index_text)));
        } catch (const Error&) {
            fail("root(...) index must be an integer");
        }
        return Alg::from_minpoly(ints, index);
    }

    static Value constant_value(const Alg& c) { return series_value(Puiseux(c)); }
    static Value series_value(const Puiseux& f) {
        Value v;
        v[0] = XiExpr(f);
        clean(v);
        return v;
    }
    static Value neg(Value v) {
        for (auto& [k, x] : v) x = -x;
        return v;
    }
    static Value add(Value a, const Value& b) {
        for (const auto& [k, x] : b) a[k] = a[k] + x;
        clean(a);
        return a;
    }

    MahlerOperator to_op(const Value& v) const {
        int top = v.empty() ? 0 : v.rbegin()->first;
        std::vector<Puiseux> c(static_cast<std::size_t>(top + 1));
        for (const auto& [k, x] : v) {
            auto f = as_series(x);
            if (!f) fail("xi terms cannot multiply the operator M");
            c[static_cast<std::size_t>(k)] = *f;
        }
        return MahlerOperator(p_, std::move(c));
    }

    Value mul(const Value& a, const Value& b) const {
        if (m_free(a) && m_free(b)) {
            XiExpr x = scalar_part(a), y = scalar_part(b);
            Value v;
            if (auto f = as_series(x))
                v[0] = *f * y;
            else if (auto g = as_series(y))
                v[0] = *g * x;
            else
                v[0] = xi_multiply(x, y, p_);
            clean(v);
            return v;
        }
        if (p_ < 2) fail("operator products need \"@ p=N\"");
        MahlerOperator r = to_op(a) * to_op(b);
        Value v;
        for (int i = 0; i <= r.order(); ++i) v[i] = XiExpr(r.coeff(i));
        clean(v);
        return v;
    }

    Value divide(const Value& a, const Value& b) const {
        auto f = m_free(b) ? as_series(scalar_part(b)) : std::nullopt;
        if (!f || !f->is_exact() || f->terms().size() != 1) fail("division only by a nonzero monomial");
        const auto& [e, c] = *f->terms().begin();
        return mul(a, series_value(Puiseux::monomial(c.inverse(), -e)));
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    long p_;
    bool allow_m_, allow_xi_;
    char var_;
};

std::vector<std::string> parenthesized_list(const std::string& text, const std::string& whole) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        raise(ErrorKind::ParseError, "expected a parenthesized list in \"" + whole + "\"");
    std::string inner = trim(t.substr(1, t.size() - 2));
    if (inner.empty()) return {};
    auto parts = split_top(inner, ',');
    for (auto& x : parts) x = trim(x);
    return parts;
}

std::string format_exponent(const Rational& e) {
    return is_integer(e) ? to_string(e) : "(" + to_string(e) + ")";
}

// Monomial text with its sign split off.
std::pair<bool, std::string> monomial_text(const Rational& e, const Alg& c) {
    bool neg = c.is_rational() && sgn(c.rational()) < 0;
    std::string cs = c.is_rational() ? to_string(Rational(abs(c.rational()))) : "(" + c.to_string() + ")";
    bool unit = c.is_rational() && abs(c.rational()) == 1;
    if (sgn(e) == 0) return {neg, cs};
    std::string s = unit ? "" : cs + "*";
    s += "z";
    if (e != 1) s += "^" + format_exponent(e);
    return {neg, s};
}

void append_signed(std::string& out, bool neg, const std::string& body) {
    if (out.empty())
        out += neg ? "-" + body : body;
    else
        out += (neg ? " - " : " + ") + body;
}

}  // namespace

// ---------------------------------------------------------------- parsers

Puiseux parse_puiseux(const std::string& text) {
    Parser parser(text, 2, false, false);
    Value v = parser.parse_all();
    auto f = as_series(scalar_part(v));
    if (!m_free(v) || !f) raise(ErrorKind::ParseError, "not a series: \"" + text + "\"");
    return *f;
}

Alg parse_algebraic(const std::string& text) {
    Parser parser(text, 2, false, false);
    Value v = parser.parse_all();
    auto c = m_free(v) ? as_constant(scalar_part(v)) : std::nullopt;
    if (!c) raise(ErrorKind::ParseError, "not a constant: \"" + text + "\"");
    return *c;
}

XiIndex parse_xi_index(const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 4 || t.compare(0, 3, "xi[") != 0 || t.back() != ']')
        raise(ErrorKind::ParseError, "expected xi[...]: \"" + text + "\"");
    std::string inner = trim(t.substr(3, t.size() - 4));
    if (inner.empty()) return XiIndex();
    auto parts = split_top(inner, ';');
    if (parts.size() != 3) raise(ErrorKind::ParseError, "xi index needs three lists: \"" + text + "\"");
    const char* names[3] = {"alpha", "lambda", "a"};
    std::vector<std::string> lists[3];
    for (int k = 0; k < 3; ++k) {
        std::string part = trim(parts[static_cast<std::size_t>(k)]);
        auto eq = part.find('=');
        if (eq != std::string::npos && part.front() != '(') {
            if (trim(part.substr(0, eq)) != names[k])
                raise(ErrorKind::ParseError, std::string("expected '") + names[k] + "=' in \"" + text + "\"");
            part = part.substr(eq + 1);
        }
        lists[k] = parenthesized_list(part, text);
    }
    if (lists[0].size() != lists[1].size() || lists[0].size() != lists[2].size())
        raise(ErrorKind::ParseError, "xi index lists differ in length: \"" + text + "\"");
    std::vector<int> alpha;
    std::vector<Alg> lambda;
    std::vector<Rational> a;
    for (std::size_t i = 0; i < lists[0].size(); ++i) {
        Rational al = parse_rational(lists[0][i]);
        if (!is_integer(al) || al < 0) raise(ErrorKind::ParseError, "alpha entries must be nonnegative integers");
        alpha.push_back(static_cast<int>(to_long(al)));
        lambda.push_back(parse_algebraic(lists[1][i]));
        Alg ai = parse_algebraic(lists[2][i]);
        if (!ai.is_rational()) raise(ErrorKind::ParseError, "a entries must be rational");
        a.push_back(ai.rational());
    }
    try {
        return XiIndex(std::move(alpha), std::move(lambda), std::move(a));
    } catch (const Error& e) {
        raise(ErrorKind::ParseError, std::string("invalid xi index: ") + e.what());
    }
}

XiExpr parse_xi_expr(const std::string& text, long p) {
    Parser parser(text, p, false, true);
    Value v = parser.parse_all();
    if (!m_free(v)) raise(ErrorKind::ParseError, "unexpected operator term in \"" + text + "\"");
    return scalar_part(v);
}

GeneralizedSeries parse_generalized_series(const std::string& text, long p) {
    GeneralizedSeries g;
    std::string t = trim(text);
    if (t.empty()) raise(ErrorKind::ParseError, "empty generalized series");
    if (t.front() != '[') {
        if (t != "0") g.add({Alg(1), 0}, parse_xi_expr(t, p));
        return g;
    }
    for (const auto& block_raw : split_top(t, ';')) {
        std::string block = trim(block_raw);
        auto close = block.find(']');
        auto open_brace = block.find('{');
        if (block.empty() || block.front() != '[' || close == std::string::npos || open_brace == std::string::npos ||
            block.back() != '}')
            raise(ErrorKind::ParseError, "malformed block \"" + block + "\"");
        Alg c(1);
        int j = 0;
        for (const auto& field : split_top(block.substr(1, close - 1), ',')) {
            std::string f = trim(field);
            auto eq = f.find('=');
            if (eq == std::string::npos) raise(ErrorKind::ParseError, "malformed label \"" + f + "\"");
            std::string key = trim(f.substr(0, eq)), val = trim(f.substr(eq + 1));
            if (key == "c")
                c = parse_algebraic(val);
            else if (key == "j")
                j = static_cast<int>(to_long(parse_rational(val)));
            else
                raise(ErrorKind::ParseError, "unknown label \"" + key + "\"");
        }
        if (c.is_zero() || j < 0) raise(ErrorKind::ParseError, "invalid label in \"" + block + "\"");
        g.add({c, j}, parse_xi_expr(block.substr(open_brace + 1, block.size() - open_brace - 2), p));
    }
    return g;
}

MahlerOperator parse_operator(const std::string& text, long default_p) {
    std::string body = text;
    long p = default_p;
    auto at = text.rfind('@');
    if (at != std::string::npos) {
        std::string tail = trim(text.substr(at + 1));
        body = text.substr(0, at);
        if (tail.compare(0, 2, "p=") != 0) raise(ErrorKind::ParseError, "expected \"@ p=N\" in \"" + text + "\"");
        Rational pr;
        try {
            pr = parse_rational(tail.substr(2));
        } catch (const Error&) {
            raise(ErrorKind::ParseError, "malformed p in \"" + text + "\"");
        }
        if (!is_integer(pr) || pr < 2) raise(ErrorKind::ParseError, "p must be an integer >= 2");
        p = to_long(pr);
    }
    if (p < 2) raise(ErrorKind::ParseError, "missing \"@ p=N\" in \"" + text + "\"");
    Parser parser(body, p, true, false);
    Value v = parser.parse_all();
    int top = v.empty() ? -1 : v.rbegin()->first;
    std::vector<Puiseux> coeffs(static_cast<std::size_t>(top + 1));
    for (const auto& [k, x] : v) coeffs[static_cast<std::size_t>(k)] = *as_series(x);
    if (coeffs.empty()) raise(ErrorKind::ParseError, "zero operator");
    return MahlerOperator(p, std::move(coeffs));
}

MahlerOperator parse_operator(const std::string& text) { return parse_operator(text, 0); }

// ---------------------------------------------------------------- compact text

std::string to_compact_string(const XiIndex& w) {
    std::string s = "xi[(";
    for (std::size_t i = 0; i < w.length(); ++i) s += (i ? "," : "") + std::to_string(w.alpha[i]);
    s += ");(";
    for (std::size_t i = 0; i < w.length(); ++i) s += (i ? "," : "") + w.lambda[i].to_string();
    s += ");(";
    for (std::size_t i = 0; i < w.length(); ++i) s += (i ? "," : "") + to_string(w.a[i]);
    return s + ")]";
}

std::string to_compact_string(const XiExpr& x) {
    std::string out;
    for (const auto& [w, f] : x.terms()) {
        if (w.empty()) {
            for (const auto& [e, c] : f.terms()) {
                auto [neg, body] = monomial_text(e, c);
                append_signed(out, neg, body);
            }
            if (f.precision()) append_signed(out, false, "O(z^" + format_exponent(*f.precision()) + ")");
            continue;
        }
        const std::string xs = to_compact_string(w);
        if (f.is_exact() && f.terms().size() == 1) {
            const auto& [e, c] = *f.terms().begin();
            auto [neg, body] = monomial_text(e, c);
            bool unit = c.is_rational() && abs(c.rational()) == 1;
            if (sgn(e) == 0 && unit)
                append_signed(out, neg, xs);
            else
                append_signed(out, neg, body + "*" + xs);
        } else {
            append_signed(out, false, "(" + f.to_string() + ")*" + xs);
        }
    }
    return out.empty() ? "0" : out;
}

std::string to_compact_string(const GeneralizedSeries& g) {
    if (g.terms().empty()) return "0";
    std::string s;
    for (const auto& [k, e] : g.terms()) {
        if (!s.empty()) s += " ; ";
        s += "[c=" + k.c.to_string() + ", j=" + std::to_string(k.j) + "] { " + to_compact_string(e) + " }";
    }
    return s;
}

std::string to_string_in_z(const AlgPoly& f) {
    Puiseux::Terms t;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i)
        if (!f.coeffs()[i].is_zero()) t.emplace(Rational(static_cast<long>(i)), f.coeffs()[i]);
    return Puiseux::from_terms(std::move(t)).to_string();
}

// ---------------------------------------------------------------- JSON

Json to_json(const Rational& x) { return to_string(x); }
Json to_json(const Alg& x) { return alg_to_json_string(x); }

namespace {
Json integer_json(const Integer& x) { return x.fits_slong_p() ? Json(x.get_si()) : Json(x.get_str()); }
}  // namespace

Json to_json(const Puiseux& f) {
    Json terms = Json::array();
    for (const auto& [e, c] : f.terms())
        terms.push_back(Json::array({integer_json(e.get_num()), integer_json(e.get_den()), alg_to_json_string(c)}));
    Json j;
    j["terms"] = terms;
    j["precision"] = f.precision() ? Json(to_string(*f.precision())) : Json(nullptr);
    return j;
}

Json to_json(const MahlerOperator& l) {
    Json c = Json::array();
    for (const auto& a : l.coeffs()) c.push_back(to_json(a));
    return Json{{"p", l.p()}, {"coefficients", c}, {"text", l.to_string()}};
}

Json to_json(const XiIndex& w) {
    Json lambda = Json::array(), a = Json::array();
    for (const auto& x : w.lambda) lambda.push_back(to_json(x));
    for (const auto& x : w.a) a.push_back(to_json(x));
    return Json{{"alpha", w.alpha}, {"lambda", lambda}, {"a", a}};
}

Json to_json(const XiExpr& x) {
    Json out = Json::array();
    for (const auto& [w, f] : x.terms()) out.push_back(Json{{"index", to_json(w)}, {"coefficient", to_json(f)}});
    return out;
}

Json to_json(const GeneralizedSeries& g) {
    Json out = Json::array();
    for (const auto& [k, e] : g.terms())
        out.push_back(Json{{"c", to_json(k.c)}, {"j", k.j}, {"expr", to_json(e)}, {"text", to_compact_string(e)}});
    return out;
}

namespace {
template <class T, class F>
Json matrix_json(const Matrix<T>& m, F&& f) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(f(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}
}  // namespace

Json to_json(const SeriesMatrix& m) {
    return matrix_json(m, [](const Puiseux& x) { return Json(x.to_string()); });
}
Json to_json(const XiMatrix& m) {
    return matrix_json(m, [](const XiExpr& x) { return Json(to_compact_string(x)); });
}
Json to_json(const AlgMatrix& m) {
    return matrix_json(m, [](const Alg& x) { return to_json(x); });
}

Json to_json(const NewtonData& d) {
    Json vertices = Json::array(), edges = Json::array();
    for (const auto& [x, y] : d.vertices) vertices.push_back(Json::array({to_json(x), to_json(y)}));
    for (const auto& e : d.edges) {
        Json ex = Json::array();
        for (const auto& c : e.exponents) ex.push_back(to_json(c));
        Json ch = Json::array();
        for (const auto& c : e.characteristic.coeffs()) ch.push_back(to_json(c));
        edges.push_back(Json{{"slope", to_json(e.slope)},
                             {"start", e.start},
                             {"end", e.end},
                             {"multiplicity", e.multiplicity},
                             {"characteristic", ch},
                             {"exponents", ex}});
    }
    return Json{{"vertices", vertices}, {"edges", edges}};
}

Json to_json(const Factorization& f) {
    Json factors = Json::array();
    Rational scale(1);
    for (const auto& x : f.factors) {
        // `slope` is read on the factor's own polygon; the corresponding slope
        // of the input polygon is smaller by p per factor already peeled.
        factors.push_back(Json{{"nu", to_json(x.nu)},
                               {"slope", to_json(x.slope)},
                               {"newton_slope", to_json(Rational(x.slope / scale))},
                               {"c", to_json(x.c)},
                               {"h", x.h.to_string()}});
        scale *= x.p;
    }
    return Json{{"unit", f.unit.to_string()},
                {"factors", factors},
                {"field", f.field ? Json(f.field->describe()) : Json("Q")},
                {"achieved_precision", to_json(f.achieved_precision)}};
}

Json to_json(const ResidualReport& r) {
    return Json{{"zero", r.zero},
                {"precision", r.precision ? to_json(*r.precision) : Json("exact")},
                {"terms_checked", r.terms_checked},
                {"first_nonzero", r.first_nonzero}};
}

Json to_json(const ReductionResult& r) {
    Json blocks = Json::array(), slopes = Json::array();
    for (auto b : r.blocks) blocks.push_back(b);
    for (const auto& s : r.block_slopes) slopes.push_back(to_json(s));
    return Json{{"p", r.p},
                {"field", r.field ? Json(r.field->describe()) : Json("Q")},
                {"blocks", blocks},
                {"block_slopes", slopes},
                {"F1", to_json(r.F1)},
                {"F2", to_json(r.F2)},
                {"Theta", to_json(r.Theta)},
                {"C", to_json(r.C)},
                {"residual_report", to_json(r.residual)},
                {"working_precision", to_json(r.working_precision)}};
}

Json to_json(const GrowthClass& g) {
    Json fits = Json::object(), vis = Json::object();
    for (int r = 1; r <= 5; ++r) {
        fits["C" + std::to_string(r)] = g.envelope_fits[static_cast<std::size_t>(r)];
        vis["C" + std::to_string(r)] = g.omega_visible[static_cast<std::size_t>(r)];
    }
    return Json{{"class", to_string(g.label)},
                {"mode", g.mode},
                {"evidence", g.evidence},
                {"samples", g.samples},
                {"max_log_H", static_cast<double>(g.max_log_H)},
                {"envelope_fits", fits},
                {"omega_visible", vis},
                {"notes", g.notes}};
}

Json to_json(const DenominatorReport& d) {
    Json cand = Json::array(), roots = Json::array();
    for (const auto& c : d.candidate.coeffs()) cand.push_back(to_json(c));
    for (const auto& r : d.roots)
        roots.push_back(Json{{"root", to_json(r.root)},
                             {"multiplicity", r.multiplicity},
                             {"unity_order", r.unity_order ? Json(*r.unity_order) : Json(nullptr)}});
    return Json{{"zero_ideal", d.zero_ideal},
                {"candidate", cand},
                {"candidate_text", to_string_in_z(d.candidate)},
                {"operator", d.op ? Json(d.op->to_string()) : Json(nullptr)},
                {"provenance", d.provenance},
                {"roots", roots}};
}

Json to_json(const PurityReport& r) {
    Json basis = Json::array(), classes = Json::array(), agree = Json::object();
    for (const auto& b : r.basis) basis.push_back(to_compact_string(b));
    for (const auto& c : r.basis_classes) classes.push_back(to_json(c));
    for (int k = 1; k <= 5; ++k) agree["C" + std::to_string(k)] = r.agree[static_cast<std::size_t>(k)];
    return Json{{"class", to_json(r.input_class)},
                {"nu", r.nu},
                {"k", r.k},
                {"operator", r.op.to_string()},
                {"operator_guessed", r.op_guessed},
                {"basis", basis},
                {"basis_classes", classes},
                {"agree", agree},
                {"warnings", r.warnings}};
}

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) raise(ErrorKind::ParseError, "expected a rational string");
    return parse_rational(j.get<std::string>());
}

Alg alg_from_json(const Json& j) {
    if (j.is_number_integer()) return Alg(j.get<long>());
    if (!j.is_string()) raise(ErrorKind::ParseError, "expected an algebraic number string");
    return parse_algebraic(j.get<std::string>());
}

Puiseux puiseux_from_json(const Json& j) {
    const Json& terms = j.is_array() ? j : j.at("terms");
    Puiseux::Terms t;
    for (const auto& term : terms) {
        if (!term.is_array() || term.size() != 3) raise(ErrorKind::ParseError, "series term must be [num, den, coeff]");
        auto as_int = [](const Json& x) {
            return x.is_string() ? Integer(x.get<std::string>()) : Integer(x.get<long>());
        };
        Rational e(as_int(term[0]), as_int(term[1]));
        if (sgn(e.get_den()) == 0) raise(ErrorKind::ParseError, "zero exponent denominator");
        e.canonicalize();
        Alg c = alg_from_json(term[2]);
        if (!c.is_zero()) t[e] += c;
    }
    std::optional<Rational> prec;
    if (j.is_object() && j.contains("precision") && !j.at("precision").is_null())
        prec = rational_from_json(j.at("precision"));
    return Puiseux::from_terms(std::move(t), prec);
}

MahlerOperator operator_from_json(const Json& j) {
    try {
        std::vector<Puiseux> c;
        for (const auto& x : j.at("coefficients")) c.push_back(puiseux_from_json(x));
        return MahlerOperator(j.at("p").get<long>(), std::move(c));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, e.what());
    }
}

XiIndex xi_index_from_json(const Json& j) {
    try {
        std::vector<Alg> lambda;
        std::vector<Rational> a;
        for (const auto& x : j.at("lambda")) lambda.push_back(alg_from_json(x));
        for (const auto& x : j.at("a")) a.push_back(rational_from_json(x));
        return XiIndex(j.at("alpha").get<std::vector<int>>(), std::move(lambda), std::move(a));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, e.what());
    }
}

XiExpr xi_expr_from_json(const Json& j) {
    XiExpr x;
    try {
        for (const auto& t : j) x.add(xi_index_from_json(t.at("index")), puiseux_from_json(t.at("coefficient")));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, e.what());
    }
    return x;
}

GeneralizedSeries generalized_series_from_json(const Json& j) {
    GeneralizedSeries g;
    try {
        for (const auto& t : j) g.add({alg_from_json(t.at("c")), t.at("j").get<int>()}, xi_expr_from_json(t.at("expr")));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, e.what());
    }
    return g;
}

Json json_document(const std::string& kind, Json payload) {
    Json doc{{"format", kJsonFormat}, {"kind", kind}};
    if (payload.is_object())
        for (auto it = payload.begin(); it != payload.end(); ++it) doc[it.key()] = it.value();
    else
        doc["result"] = std::move(payload);
    return doc;
}

}  // namespace mahler
