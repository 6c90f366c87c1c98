#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/operators.hpp"
#include "mahler/series.hpp"

namespace mahler {

// omega = (alpha, lambda, a): xi_omega = sum over k_1..k_t >= 1 of
// prod k_j^alpha_j * prod lambda_j^(k_1+..+k_j) * z^(-sum a_j / p^(k_1+..+k_j)).
// The empty index stands for the constant 1.
struct XiIndex {
    std::vector<int> alpha;
    std::vector<Alg> lambda;
    std::vector<Rational> a;

    XiIndex() = default;
    XiIndex(std::vector<int> alpha_, std::vector<Alg> lambda_, std::vector<Rational> a_);

    std::size_t length() const { return alpha.size(); }
    bool empty() const { return alpha.empty(); }
    // (alpha_2..), (lambda_2..), (a_2..)
    XiIndex tail() const;
    // lambda_1 * ... * lambda_t (1 for the empty index).
    Alg lambda_product() const;
    Rational a_sum() const;
    // All a-entries have numerator and denominator prime to p.
    bool is_standard(long p) const;
    XiIndex with_first(int alpha1, const Alg& lambda1, const Rational& a1) const;  // prepend
    XiIndex with_alpha1(int alpha1) const;                                        // replace alpha_1

    int compare(const XiIndex& o) const;
    friend bool operator<(const XiIndex& x, const XiIndex& y) { return x.compare(y) < 0; }
    friend bool operator==(const XiIndex& x, const XiIndex& y) { return x.compare(y) == 0; }

    // xi[alpha=(0,1); lambda=(1,-2); a=(1,1/3)]
    std::string to_string() const;
};

// Finite sum of Puiseux coefficients times xi_omega.
class XiExpr {
public:
    using Terms = std::map<XiIndex, Puiseux>;

    XiExpr() = default;
    XiExpr(const Puiseux& f);  // f * xi_() = f
    static XiExpr xi(const XiIndex& w, const Puiseux& coef = Puiseux(1));

    const Terms& terms() const { return terms_; }
    // Adds coef * xi_w; drops exact zeros, keeps truncated zeros for precision.
    void add(const XiIndex& w, const Puiseux& coef);
    void add(const XiExpr& e);
    Puiseux coefficient(const XiIndex& w) const;

    bool is_zero() const;  // every known coefficient vanishes
    bool is_exact_zero() const { return terms_.empty(); }
    bool is_exact() const;
    // Minimum coefficient precision (nullopt when exact).
    std::optional<Rational> precision() const;
    bool is_standard(long p) const;
    // Largest index length with a nonzero coefficient (0 for pure series).
    int filtration_degree() const;

    XiExpr operator-() const;
    friend XiExpr operator+(const XiExpr& x, const XiExpr& y);
    friend XiExpr operator-(const XiExpr& x, const XiExpr& y);
    friend XiExpr operator*(const Puiseux& f, const XiExpr& x);
    friend bool operator==(const XiExpr& x, const XiExpr& y) { return x.terms_ == y.terms_; }

    XiExpr truncated(const Rational& n) const;
    std::string to_string() const;

private:
    Terms terms_;
};

// Symbol e_c * l^j with sigma(e_c) = c e_c and sigma(l) = l + 1.
struct ExpLogKey {
    Alg c;
    int j = 0;
    friend bool operator<(const ExpLogKey& x, const ExpLogKey& y) {
        int k = x.c.compare(y.c);
        return k != 0 ? k < 0 : x.j < y.j;
    }
    friend bool operator==(const ExpLogKey& x, const ExpLogKey& y) { return x.c == y.c && x.j == y.j; }
};

class GeneralizedSeries {
public:
    using Terms = std::map<ExpLogKey, XiExpr>;

    GeneralizedSeries() = default;
    static GeneralizedSeries single(const Alg& c, int j, const XiExpr& x);

    const Terms& terms() const { return terms_; }
    void add(const ExpLogKey& key, const XiExpr& x);
    void add(const GeneralizedSeries& g);
    XiExpr part(const Alg& c, int j) const;

    bool is_zero() const;
    std::optional<Rational> precision() const;

    friend GeneralizedSeries operator+(const GeneralizedSeries& x, const GeneralizedSeries& y);
    friend GeneralizedSeries operator-(const GeneralizedSeries& x, const GeneralizedSeries& y);
    friend GeneralizedSeries operator*(const Puiseux& f, const GeneralizedSeries& x);
    friend bool operator==(const GeneralizedSeries& x, const GeneralizedSeries& y) { return x.terms_ == y.terms_; }

    std::string to_string() const;

private:
    Terms terms_;
};

// ---- Mahler shifts
// sigma^j(xi_omega) rewritten over indices with the same a-entries.
XiExpr xi_shift(const XiIndex& w, long j, long p);
XiExpr sigma(const XiExpr& x, long j, long p);
GeneralizedSeries sigma(const GeneralizedSeries& g, long j, long p);

// ---- products
XiExpr xi_multiply(const XiExpr& x, const XiExpr& y, long p);
// xi -> xi-tilde (strictly increasing cumulative indices) and back.
XiExpr xi_to_tilde(const XiIndex& w);
XiExpr tilde_to_xi(const XiIndex& w);

// ---- sigma^-1 sums: sum_{k>=1} k^alpha c^k sigma^{-k}(h)
XiExpr xi_sigma_inverse_sum(int alpha, const Alg& c, const XiExpr& h, long p);

// ---- standard decomposition
struct StandardizeOptions {
    long budget = 2000000;  // recursion steps
};
XiExpr standardize(const XiExpr& x, long p, const StandardizeOptions& opt = {});
XiExpr standardize(const XiIndex& w, long p, const StandardizeOptions& opt = {});
GeneralizedSeries standardize(const GeneralizedSeries& g, long p, const StandardizeOptions& opt = {});

// ---- operators
MahlerOperator xi_annihilator(const XiIndex& w, long p);
GeneralizedSeries apply_operator(const MahlerOperator& l, const GeneralizedSeries& g);
XiExpr apply_operator(const MahlerOperator& l, const XiExpr& x);

// ---- expansion oracle
// Exact coefficient of z^e in xi_omega, by direct enumeration of the defining sum.
Alg xi_coefficient(const XiIndex& w, const Rational& e, long p);
// Exact coefficient of z^e in x; PrecisionLoss if a Puiseux coefficient is
// not known far enough.
Alg xi_coefficient(const XiExpr& x, const Rational& e, long p);
// Whether the coefficient of z^e of x is determined by the stored data.
bool xi_coefficient_known(const XiExpr& x, const Rational& e);

// Exponents of xi_omega in [lower, upper] whose cumulative indices stay
// <= depth. Complete when t <= 1 and upper < 0.
TruncatedHahn xi_expand(const XiIndex& w, const Rational& upper, long p,
                        std::optional<Rational> lower = std::nullopt, int depth = 12);

struct WindowCheck {
    bool equal = true;
    std::size_t compared = 0;            // exponents compared
    std::optional<Rational> mismatch;    // first differing exponent
    Rational upper_used;                 // window actually checked (clipped by precision)
};
// Compares two expressions at every candidate exponent (depth-bounded
// enumeration of both supports) in [lower, upper].
WindowCheck window_compare(const XiExpr& x, const XiExpr& y, long p, const Rational& lower,
                           const Rational& upper, int depth = 10);

// Clears the per-thread rewrite caches (used by benchmarks).
void clear_xi_caches();

}  // namespace mahler
