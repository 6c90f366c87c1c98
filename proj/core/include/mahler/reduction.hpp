#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mahler/linalg.hpp"
#include "mahler/operators.hpp"
#include "mahler/xi.hpp"

namespace mahler {

using XiMatrix = Matrix<XiExpr>;

XiMatrix xi_zero_matrix(std::size_t rows, std::size_t cols);
XiMatrix xi_identity(std::size_t n);
XiMatrix to_xi_matrix(const SeriesMatrix& m);
XiMatrix xi_matmul(const XiMatrix& x, const XiMatrix& y, long p);
XiMatrix xi_matmul(const SeriesMatrix& x, const XiMatrix& y);
XiMatrix xi_matmul(const XiMatrix& x, const AlgMatrix& c);
XiMatrix sigma(const XiMatrix& m, long j, long p);
XiMatrix standardize(const XiMatrix& m, long p);

// ---- regular singular blocks
// G = I + sum_{g>0} G_g z^g with sigma(G) A = A(0) G, known below n.
SeriesMatrix reduce_regular_singular(const SeriesMatrix& a, long p, const Rational& n);

// ---- Step 1: block upper triangular form with constant diagonal blocks.
struct BlockTriangular {
    long p = 2;
    FieldPtr field;
    Alg generator_image;                 // embedding of the operator's field
    Factorization factorization;
    SeriesMatrix T;                      // T[companion] = A1 (lower triangular)
    SeriesMatrix A1;                     // upper bidiagonal
    SeriesMatrix G;                      // block-diagonal regular singular gauge
    SeriesMatrix A2;                     // G[A1]
    std::vector<std::size_t> blocks;     // block sizes (one block per slope)
    std::vector<Rational> block_slopes;  // slope of each block
};
BlockTriangular block_triangularize(const MahlerOperator& l, const Rational& n);

// ---- Step 2
// C1 M - sigma(M) C2 = B for B with positive exponents only, known below n.
SeriesMatrix solve_positive_sylvester(const AlgMatrix& c1, const AlgMatrix& c2, const SeriesMatrix& b, long p,
                                      const Rational& n);
struct PositiveClearing {
    SeriesMatrix H;       // product of the elementary gauges
    SeriesMatrix Theta;   // H[A]: off-diagonal blocks without positive exponents
};
PositiveClearing clear_positive_offdiag(const SeriesMatrix& a, const std::vector<std::size_t>& blocks, long p,
                                        const Rational& n);

// ---- Step 3
// sigma(F) C2 - C1 F = B for B a combination of z^-g xi_w (g > 0 or w nonempty).
XiMatrix solve_xi_sylvester(const AlgMatrix& c1, const AlgMatrix& c2, const XiMatrix& b, long p);
struct Constantification {
    XiMatrix K;   // K[Theta] = C, unipotent block upper triangular
    AlgMatrix C;  // constant term of Theta
};
Constantification constantify(const SeriesMatrix& theta, const std::vector<std::size_t>& blocks, long p);

// ---- assembly
struct ResidualReport {
    bool zero = true;                   // every known residual coefficient vanishes
    std::optional<Rational> precision;  // residual known below this exponent (nullopt: exact)
    std::size_t terms_checked = 0;
    std::string first_nonzero;          // description of the first offending entry
};

struct ReductionResult {
    long p = 2;
    FieldPtr field;
    Alg generator_image;  // embedding of the input field into `field`
    SeriesMatrix F1;
    XiMatrix F2;
    SeriesMatrix Theta;
    AlgMatrix C;
    std::vector<std::size_t> blocks;        // slope profile
    std::vector<Rational> block_slopes;
    std::vector<std::size_t> final_blocks;  // profile after triangularizing each A_i
    MahlerSystem system;                    // the reduced system (embedded in `field`)
    ResidualReport residual;
    Rational working_precision;
};

struct ReductionOptions {
    int max_retries = 5;
    Rational margin = Rational(4);
};

ReductionResult reduce_to_constant(const MahlerOperator& l, const Rational& n, const ReductionOptions& opt = {});
ReductionResult reduce_to_constant(const MahlerSystem& a, const Rational& n, const ReductionOptions& opt = {});

// sigma(F) C - A F for F = F1 F2, standardized.
ResidualReport verify_gauge(const MahlerSystem& a, const XiMatrix& f, const AlgMatrix& c);

// Symbols e_c l^j with rational-or-algebraic coefficients.
using LabelCombo = std::map<ExpLogKey, Alg>;
using LabelMatrix = Matrix<LabelCombo>;
LabelMatrix constant_solution_matrix(const AlgMatrix& c);
LabelCombo sigma(const LabelCombo& x);
std::string to_string(const LabelCombo& x);

// F e_C as a matrix of generalized series.
Matrix<GeneralizedSeries> symbolic_solution_matrix(const XiMatrix& f, const LabelMatrix& e, long p);

// Basis of solutions of L: first row of F1 F2 e_C, standardized and put in
// reduced echelon form over the monomials (c, j, xi index, exponent).
std::vector<GeneralizedSeries> solution_basis(const MahlerOperator& l, const Rational& n,
                                              const ReductionOptions& opt = {});
std::vector<GeneralizedSeries> canonical_basis(std::vector<GeneralizedSeries> sols);

}  // namespace mahler
