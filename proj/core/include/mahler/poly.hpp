#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/rational.hpp"

namespace mahler {

namespace detail {
// Unqualified call so argument-dependent lookup sees overloads declared
// after this header (e.g. for Alg).
template <class T>
bool coeff_is_zero(const T& x) {
    return is_zero(x);
}
}  // namespace detail

// Dense univariate polynomial over a field T, coefficients in ascending order.
// T must provide the field operations, construction from int, and a free
// is_zero(const T&).
template <class T>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static Poly constant(const T& a) { return Poly(std::vector<T>{a}); }
    static Poly monomial(const T& a, std::size_t k) {
        std::vector<T> c(k + 1, T(0));
        c[k] = a;
        return Poly(std::move(c));
    }
    static Poly x() { return monomial(T(1), 1); }

    bool is_zero() const { return c_.empty(); }
    // Degree of the zero polynomial is -1.
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
    const T& lead() const {
        require(!c_.empty(), ErrorKind::InvalidArgument, "leading coefficient of zero polynomial");
        return c_.back();
    }

    void set_coeff(std::size_t i, const T& a) {
        if (i >= c_.size()) c_.resize(i + 1, T(0));
        c_[i] = a;
        trim();
    }

    T operator()(const T& x) const {
        T r(0);
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    template <class U>
    U eval_as(const U& x) const {
        U r(0);
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + U(c_[i]);
        return r;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& a : r.c_) a = -a;
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] = c[i] + b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (detail::coeff_is_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        }
        return Poly(std::move(c));
    }
    friend Poly operator*(const T& s, const Poly& a) {
        std::vector<T> c = a.c_;
        for (auto& x : c) x = s * x;
        return Poly(std::move(c));
    }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Euclidean division over a field: a = q*b + r with deg r < deg b.
    static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
        require(!b.is_zero(), ErrorKind::InvalidArgument, "polynomial division by zero");
        std::vector<T> rem = a.c_;
        long db = b.degree();
        long da = a.degree();
        if (da < db) {
            q = Poly();
            r = a;
            return;
        }
        std::vector<T> quo(static_cast<std::size_t>(da - db + 1), T(0));
        T inv_lead = T(1) / b.lead();
        for (long k = da - db; k >= 0; --k) {
            T coef = rem[static_cast<std::size_t>(k + db)] * inv_lead;
            quo[static_cast<std::size_t>(k)] = coef;
            if (detail::coeff_is_zero(coef)) continue;
            for (long j = 0; j <= db; ++j) {
                auto idx = static_cast<std::size_t>(k + j);
                rem[idx] = rem[idx] - coef * b.c_[static_cast<std::size_t>(j)];
            }
        }
        rem.resize(static_cast<std::size_t>(db));
        q = Poly(std::move(quo));
        r = Poly(std::move(rem));
    }
    friend Poly operator/(const Poly& a, const Poly& b) {
        Poly q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend Poly operator%(const Poly& a, const Poly& b) {
        Poly q, r;
        divmod(a, b, q, r);
        return r;
    }

    Poly monic() const {
        if (is_zero()) return *this;
        T inv = T(1) / lead();
        return inv * (*this);
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<T> d(c_.size() - 1, T(0));
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = T(static_cast<long>(i)) * c_[i];
        return Poly(std::move(d));
    }

    // p(x + s)
    Poly shifted(const T& s) const {
        Poly r;
        Poly lin({s, T(1)});
        for (std::size_t i = c_.size(); i-- > 0;) r = r * lin + constant(c_[i]);
        return r;
    }

    // p(s*x)
    Poly scaled(const T& s) const {
        std::vector<T> c = c_;
        T f(1);
        for (auto& a : c) {
            a = a * f;
            f = f * s;
        }
        return Poly(std::move(c));
    }

private:
    void trim() {
        while (!c_.empty() && detail::coeff_is_zero(c_.back())) c_.pop_back();
    }

    std::vector<T> c_;
};

template <class T>
bool is_zero(const Poly<T>& p) {
    return p.is_zero();
}

template <class T>
Poly<T> poly_gcd(Poly<T> a, Poly<T> b) {
    while (!b.is_zero()) {
        Poly<T> r = a % b;
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

// Extended gcd: returns g = s*a + t*b with g monic.
template <class T>
Poly<T> poly_xgcd(const Poly<T>& a, const Poly<T>& b, Poly<T>& s, Poly<T>& t) {
    Poly<T> r0 = a, r1 = b;
    Poly<T> s0 = Poly<T>::constant(T(1)), s1;
    Poly<T> t0, t1 = Poly<T>::constant(T(1));
    while (!r1.is_zero()) {
        Poly<T> q, r;
        Poly<T>::divmod(r0, r1, q, r);
        Poly<T> s2 = s0 - q * s1, t2 = t0 - q * t1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero()) {
        s = Poly<T>();
        t = Poly<T>();
        return r0;
    }
    T inv = T(1) / r0.lead();
    s = inv * s0;
    t = inv * t0;
    return inv * r0;
}

template <class T>
Poly<T> squarefree_part(const Poly<T>& f) {
    if (f.degree() <= 0) return f.monic();
    Poly<T> g = poly_gcd(f, f.derivative());
    return (f / g).monic();
}

template <class T>
Poly<T> pow(const Poly<T>& p, long e) {
    Poly<T> r = Poly<T>::constant(T(1));
    for (long i = 0; i < e; ++i) r = r * p;
    return r;
}

using QPoly = Poly<Rational>;

// Integer-coefficient representation of a rational polynomial: primitive
// with positive leading coefficient.
std::vector<Integer> primitive_integer_coeffs(const QPoly& f);
QPoly from_integer_coeffs(const std::vector<Integer>& c);

// Human-readable form in the variable `var`, e.g. "x^2 - x - 1".
std::string poly_to_string(const QPoly& f, const std::string& var = "x");

// Lagrange interpolation through (xs[i], ys[i]) over Q.
QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys);

// Cyclotomic polynomial Phi_n, built from x^n - 1 by dividing out Phi_d, d | n.
QPoly cyclotomic(long n);
long euler_phi(long n);

}  // namespace mahler
