#include "mahler/poly.hpp"

#include <map>
#include <mutex>

namespace mahler {

std::vector<Integer> primitive_integer_coeffs(const QPoly& f) {
    std::vector<Integer> out;
    if (f.is_zero()) return out;
    Integer den = 1;
    for (const auto& c : f.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    Integer g = 0;
    for (const auto& c : f.coeffs()) {
        Integer v = c.get_num() * (den / c.get_den());
        out.push_back(v);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    if (sgn(out.back()) < 0) g = -g;
    for (auto& v : out) v /= g;
    return out;
}

QPoly from_integer_coeffs(const std::vector<Integer>& c) {
    std::vector<Rational> r;
    r.reserve(c.size());
    for (const auto& v : c) r.emplace_back(v);
    return QPoly(std::move(r));
}

std::string poly_to_string(const QPoly& f, const std::string& var) {
    if (f.is_zero()) return "0";
    std::string out;
    for (long i = f.degree(); i >= 0; --i) {
        Rational c = f.coeff(static_cast<std::size_t>(i));
        if (is_zero(c)) continue;
        bool neg = sgn(c) < 0;
        Rational a = neg ? Rational(-c) : c;
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit = a == 1;
        if (!unit || i == 0) out += to_string(a);
        if (i > 0) {
            if (!unit) out += "*";
            out += var;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    return out;
}

QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    QPoly result;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        QPoly term = QPoly::constant(ys[i]);
        Rational denom = 1;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            term = term * QPoly({Rational(-xs[j]), Rational(1)});
            denom *= xs[i] - xs[j];
        }
        result += Rational(1 / denom) * term;
    }
    return result;
}

long euler_phi(long n) {
    long result = n;
    for (long q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            while (n % q == 0) n /= q;
            result -= result / q;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

QPoly cyclotomic(long n) {
    require(n >= 1, ErrorKind::InvalidArgument, "cyclotomic index must be positive");
    static std::mutex mu;
    static std::map<long, QPoly> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    QPoly f = QPoly::monomial(Rational(1), static_cast<std::size_t>(n)) - QPoly::constant(Rational(1));
    for (long d = 1; d < n; ++d)
        if (n % d == 0) f = f / cyclotomic(d);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, f);
    return f;
}

}  // namespace mahler
