#include "mahler/linalg.hpp"

#include <cmath>

#include "mahler/roots.hpp"

namespace mahler {

namespace {

long double log_abs(const Integer& x) {
    if (sgn(x) == 0) return 0;
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log(std::fabs(static_cast<long double>(m))) + static_cast<long double>(e) * std::log(2.0L);
}

}  // namespace

AlgMatrix to_alg_matrix(const QMatrix& m) {
    return m.map([](const Rational& x) { return Alg(x); });
}

long double weil_height(const Rational& x) {
    if (is_zero(x)) return 0;
    Integer n = abs(x.get_num());
    const Integer& d = x.get_den();
    return log_abs(n > d ? n : d);
}

long double weil_height(const Alg& x) {
    if (x.is_rational()) return weil_height(x.rational());
    auto mp = x.minimal_polynomial_integer();
    return log_mahler_measure(mp) / static_cast<long double>(mp.size() - 1);
}

std::optional<long> is_root_of_unity(const Alg& x) {
    require(!x.is_zero(), ErrorKind::InvalidArgument, "root-of-unity test on zero");
    if (x.is_rational()) {
        if (x.rational() == 1) return 1;
        if (x.rational() == -1) return 2;
        return std::nullopt;
    }
    QPoly mp = x.minimal_polynomial();
    const long d = mp.degree();
    // phi(m) >= sqrt(m/2), so phi(m) = d forces m <= 2 d^2.
    for (long m = 3; m <= 2 * d * d + 6; ++m) {
        if (euler_phi(m) != d) continue;
        if (cyclotomic(m) == mp) return m;
    }
    return std::nullopt;
}

AdditiveDunford dunford_additive(const AlgMatrix& m) {
    require(m.square(), ErrorKind::InvalidArgument, "Dunford decomposition of non-square matrix");
    const std::size_t n = m.rows();
    AlgPoly chi = charpoly(m);
    AlgPoly s = squarefree_part(chi);
    AlgPoly ds = s.derivative();
    AlgMatrix d = m;
    for (std::size_t iter = 0; iter <= n + 1; ++iter) {
        AlgMatrix sd = poly_of_matrix(s, d);
        if (sd.is_zero_matrix()) break;
        d = d - sd * inverse(poly_of_matrix(ds, d));
    }
    require(poly_of_matrix(s, d).is_zero_matrix(), ErrorKind::PrecisionLoss, "Dunford iteration did not converge");
    return {d, m - d};
}

MultiplicativeDunford dunford_multiplicative(const AlgMatrix& m) {
    auto add = dunford_additive(m);
    auto dinv = try_inverse(add.D);
    require(dinv.has_value(), ErrorKind::InvalidArgument, "multiplicative Dunford decomposition of singular matrix");
    AlgMatrix u = AlgMatrix::identity(m.rows()) + add.N * (*dinv);
    return {u, add.D};
}

AlgMatrix embed(const AlgMatrix& m, const Alg& generator_image) {
    return m.map([&](const Alg& x) { return embed(x, generator_image); });
}

AlgMatrix semisimple_eigenbasis(const AlgMatrix& d, const std::vector<Alg>& eigenvalues) {
    const std::size_t n = d.rows();
    AlgMatrix p(n, n);
    std::size_t col = 0;
    std::vector<Alg> distinct;
    for (const auto& c : eigenvalues)
        if (distinct.empty() || distinct.back() != c) distinct.push_back(c);
    for (const auto& c : distinct) {
        AlgMatrix shifted = d - c * AlgMatrix::identity(n);
        AlgMatrix ker = nullspace(shifted);
        for (std::size_t k = 0; k < ker.cols() && col < n; ++k, ++col)
            for (std::size_t i = 0; i < n; ++i) p(i, col) = ker(i, k);
    }
    require(col == n, ErrorKind::InvalidArgument, "matrix is not semisimple over the given spectrum");
    return p;
}

EigenStructure eigen_structure(const AlgMatrix& m, int max_degree) {
    require(m.square(), ErrorKind::InvalidArgument, "eigen structure of non-square matrix");
    EigenStructure e;
    std::vector<Alg> entries;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
    const FieldPtr base = common_field(entries);
    AlgPoly chi = charpoly(m);
    Splitting sp = split_polynomial(chi, max_degree, base);
    e.field = sp.field;
    e.generator_image = sp.generator_image;
    e.eigenvalues = sp.roots;
    // Re-embed the matrix if its entries lived in a proper subfield.
    AlgMatrix me = base ? embed(m, sp.generator_image) : m;
    auto dn = dunford_additive(me);
    e.D = dn.D;
    e.N = dn.N;
    e.P = semisimple_eigenbasis(e.D, e.eigenvalues);
    e.P_inv = inverse(e.P);
    AlgMatrix diag = e.P_inv * e.D * e.P;
    for (std::size_t i = 0; i < m.rows(); ++i) e.diagonal.push_back(diag(i, i));
    return e;
}

}  // namespace mahler
