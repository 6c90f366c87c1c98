#pragma once

#include <complex>
#include <vector>

#include "mahler/poly.hpp"

namespace mahler {

using ComplexLD = std::complex<long double>;

struct IsolatedRoot {
    ComplexLD value;
    // Radius of a disc around `value` certified (Smith's bound) to contain
    // exactly one root when the discs are pairwise disjoint.
    long double radius = 0;
};

// All complex roots of a squarefree rational polynomial, computed with
// 200-bit floating point and rounded. Canonical order: by real part, then by
// imaginary part (conjugate pairs: negative imaginary part first).
std::vector<IsolatedRoot> isolate_roots(const QPoly& f);

// Convenience: values only.
std::vector<ComplexLD> complex_roots(const QPoly& f);

// Index of the root of `f` (canonical order) closest to `z`.
int nearest_root_index(const std::vector<IsolatedRoot>& roots, ComplexLD z);

// Mahler measure of an integer polynomial, log form: log|lc| + sum log max(1,|r|).
long double log_mahler_measure(const std::vector<Integer>& coeffs, long double* error_bound = nullptr);

}  // namespace mahler

namespace mahler {

// Irreducible monic factors over Q of a squarefree rational polynomial of
// positive degree, found by recombining high-precision complex roots and
// confirmed by exact division. Throws UnsupportedSplitting if the search
// space exceeds an internal budget.
std::vector<QPoly> split_squarefree_over_q(const QPoly& f);

}  // namespace mahler
