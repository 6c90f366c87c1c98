#include "mahler/rational.hpp"

#include <cctype>
#include <limits>

#include "mahler/errors.hpp"

namespace mahler {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DivisionByZeroSeries: return "DivisionByZeroSeries";
        case ErrorKind::IndeterminateValuation: return "IndeterminateValuation";
        case ErrorKind::PrecisionLoss: return "PrecisionLoss";
        case ErrorKind::UnsupportedSplitting: return "UnsupportedSplitting";
        case ErrorKind::SingularGauge: return "SingularGauge";
        case ErrorKind::CyclicSearchExhausted: return "CyclicSearchExhausted";
        case ErrorKind::FactorRecurrenceStuck: return "FactorRecurrenceStuck";
        case ErrorKind::NotRegularSingularShape: return "NotRegularSingularShape";
        case ErrorKind::NoRelationFound: return "NoRelationFound";
        case ErrorKind::RecursionBudgetExceeded: return "RecursionBudgetExceeded";
        case ErrorKind::InsufficientData: return "InsufficientData";
    }
    return "Error";
}

Integer floor_of(const Rational& x) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

Integer ceil_of(const Rational& x) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

std::string to_string(const Integer& x) { return x.get_str(); }

std::string to_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string s = text.substr(b, e - b);
    if (s.empty()) raise(ErrorKind::ParseError, "empty rational");
    auto valid_int = [](const std::string& t) {
        std::size_t i = (t.size() > 0 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!num.empty() && num[0] == '+') num = num.substr(1);
    if (!valid_int(num) || !valid_int(den)) raise(ErrorKind::ParseError, "malformed rational '" + s + "'");
    Integer n(num), d(den);
    if (d == 0) raise(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

Rational pow(const Rational& base, long exponent) {
    if (exponent < 0) {
        if (is_zero(base)) raise(ErrorKind::InvalidArgument, "0 raised to a negative power");
        Rational inv = 1 / base;
        return pow(inv, -exponent);
    }
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
    r.canonicalize();
    return r;
}

long padic_valuation(const Integer& x, long p) {
    if (x == 0) raise(ErrorKind::InvalidArgument, "valuation of zero");
    Integer y = abs(x);
    Integer pz(p);
    long v = 0;
    while (mpz_divisible_p(y.get_mpz_t(), pz.get_mpz_t())) {
        y /= pz;
        ++v;
    }
    return v;
}

long padic_valuation(const Rational& x, long p) {
    return padic_valuation(Integer(x.get_num()), p) - padic_valuation(Integer(x.get_den()), p);
}

void split_p_power(const Rational& r, long p, Rational& eta, long& u) {
    if (sgn(r) <= 0) raise(ErrorKind::InvalidArgument, "split_p_power expects a positive rational");
    u = padic_valuation(r, p);
    eta = r / pow(Rational(p), u);
}

Integer binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

long to_long(const Integer& x) {
    if (!x.fits_slong_p()) raise(ErrorKind::InvalidArgument, "integer too large: " + x.get_str());
    return x.get_si();
}

long to_long(const Rational& x) {
    if (x.get_den() != 1) raise(ErrorKind::InvalidArgument, "not an integer: " + to_string(x));
    return to_long(Integer(x.get_num()));
}

double to_double(const Rational& x) { return x.get_d(); }

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t mul64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) raise(ErrorKind::PrecisionLoss, "exponent lattice overflow");
    return r;
}

std::int64_t add64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) raise(ErrorKind::PrecisionLoss, "exponent lattice overflow");
    return r;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return mul64(a / gcd64(a, b), b < 0 ? -b : b);
}

}  // namespace mahler
