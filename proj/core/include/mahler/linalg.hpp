#pragma once

#include <optional>
#include <vector>

#include "mahler/algebraic.hpp"
#include "mahler/factor.hpp"
#include "mahler/matrix.hpp"

namespace mahler {

using AlgMatrix = Matrix<Alg>;
using QMatrix = Matrix<Rational>;

AlgMatrix to_alg_matrix(const QMatrix& m);

// Logarithmic Weil height h(x) = log H(x). Exact (up to the final
// floating-point log) for rationals; for irrational algebraic numbers,
// (1/deg) log M(minpoly) with root-isolation error well below 1e-9.
long double weil_height(const Alg& x);
long double weil_height(const Rational& x);

// n if x is a primitive n-th root of unity, otherwise nullopt. Rejects x = 0.
std::optional<long> is_root_of_unity(const Alg& x);

struct AdditiveDunford {
    AlgMatrix D;  // semisimple
    AlgMatrix N;  // nilpotent, DN = ND
};
// Jordan-Chevalley decomposition by Newton iteration on the squarefree part
// of the characteristic polynomial; no factorization required.
AdditiveDunford dunford_additive(const AlgMatrix& m);

struct MultiplicativeDunford {
    AlgMatrix U;  // unipotent
    AlgMatrix D;  // semisimple, M = U D = D U
};
MultiplicativeDunford dunford_multiplicative(const AlgMatrix& m);

struct EigenStructure {
    FieldPtr field;                // splitting field (null: all eigenvalues rational)
    Alg generator_image;           // image of the input field generator in `field`
    std::vector<Alg> eigenvalues;  // with multiplicity, sorted
    AlgMatrix P;                   // columns: eigenbasis of the semisimple part
    AlgMatrix P_inv;
    AlgMatrix D;                   // semisimple part (re-embedded in `field`)
    AlgMatrix N;                   // nilpotent part
    std::vector<Alg> diagonal;     // P_inv D P = diag(diagonal)
};
// Spectrum and change of basis over one splitting field.
EigenStructure eigen_structure(const AlgMatrix& m, int max_degree = 12);

// Re-express a matrix over a field reached by an embedding (see embed()).
AlgMatrix embed(const AlgMatrix& m, const Alg& generator_image);

// Exact matrix of eigenvectors of a semisimple matrix whose eigenvalues are
// all present in `eigenvalues` (each listed with its multiplicity).
AlgMatrix semisimple_eigenbasis(const AlgMatrix& d, const std::vector<Alg>& eigenvalues);

}  // namespace mahler
