#pragma once

#include <string>
#include <vector>

#include "mahler/operators.hpp"
#include "mahler/xi.hpp"

namespace mahler {

// y + (z - 1) y(z^2) - 2z y(z^4) = 0, annihilating the Rudin-Shapiro series.
MahlerOperator rudin_shapiro_operator();
// Sum r_n z^n with r_n = +-1 the Rudin-Shapiro sequence, known below n.
Puiseux rudin_shapiro_series(const Rational& n);

// Order-2 operator (p = 2) annihilating both 1 and a Laurent series starting
// at z^-1, hence not minimal for the constant solution.
MahlerOperator non_minimal_operator();
// -z^-1 + 3z + 6z^2 + 6z^3 + 21z^4 + 21z^5 + 60z^6 + 99z^7 + 234z^8 (exact).
Puiseux laurent_example_prefix();

// The sigma^-1 sum xi = xi[(0);(-2);(1)] appearing in the Rudin-Shapiro reduction.
XiIndex rudin_shapiro_xi_index();

// Is `target` a linear combination of `span`, on all exponents below `upto`?
bool series_in_span(const Puiseux& target, const std::vector<Puiseux>& span, const Rational& upto);

// Plain series elements (c = 1, j = 0, no xi terms) of a solution basis.
std::vector<Puiseux> plain_parts(const std::vector<GeneralizedSeries>& basis);
// Correction series g of the exponent -1/2 solution of the Rudin-Shapiro
// operator, normalized so that the solution reads (f_RS / 2) xi + g.
Puiseux rudin_shapiro_correction(const std::vector<GeneralizedSeries>& basis);

struct RegressionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};
// The built-in regression pack: the Rudin-Shapiro reduction, the non-minimal
// Laurent example, the standardization identity and the purity counterexample.
std::vector<RegressionCheck> run_regression_pack();

}  // namespace mahler
