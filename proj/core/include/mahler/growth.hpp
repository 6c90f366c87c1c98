#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mahler/operators.hpp"
#include "mahler/reduction.hpp"
#include "mahler/xi.hpp"

namespace mahler {

// C1: O(H), C2: O(log^2 H), C3: O(log H), C4: O(log log H), C5: O(1) for the
// heights h(f_g) against H(g). Larger labels are stronger conditions.
enum class GrowthLabel { Unknown = 0, C1 = 1, C2 = 2, C3 = 3, C4 = 4, C5 = 5 };
std::string to_string(GrowthLabel label);

struct HeightSample {
    Rational gamma;
    long double height = 0;  // logarithmic Weil height of the coefficient (0 for 0)
    long double log_H = 0;   // log max(|num|, |den|) of the exponent (0 for 0)
};

// One sample per lattice exponent n/kappa in [lo, hi) that f determines.
std::vector<HeightSample> coefficient_heights(const Puiseux& f, const Rational& lo, const Rational& hi);

struct LabelledHeights {
    std::string where;  // "[c=.., j=..] xi[...]"
    bool finite = false;  // exact coefficient with finite support
    std::vector<HeightSample> samples;
};
// Heights of every Puiseux coefficient of the standard decomposition.
std::vector<LabelledHeights> coefficient_heights(const GeneralizedSeries& g, long p, const Rational& lo,
                                                 const Rational& hi);

struct GrowthClass {
    GrowthLabel label = GrowthLabel::Unknown;
    std::string mode;  // "empirical", "certified-by-roots", "finite-support"
    std::string evidence;
    std::size_t samples = 0;
    long double max_log_H = 0;
    std::array<bool, 6> envelope_fits{};   // [r]: O-envelope of C_r holds in-sample
    std::array<bool, 6> omega_visible{};   // [r]: growth of the C_r bound function visible
    std::vector<std::string> notes;
    bool satisfies(int r) const { return label != GrowthLabel::Unknown && static_cast<int>(label) >= r; }
};

struct EmpiricalOptions {
    std::size_t min_samples = 64;
    long double slack = 2.0L;           // multiplicative envelope slack
    long double outlier_fraction = 0.05L;
    long double c4_c5_threshold = 1.5L; // log log H needed to separate C4 from C5
};
GrowthClass classify_empirical(const std::vector<HeightSample>& samples, const EmpiricalOptions& opt = {});

// Weakest class over the Puiseux coefficients of g (finite ones count as C5).
GrowthClass classify_series(const GeneralizedSeries& g, long p, const Rational& hi, const EmpiricalOptions& opt = {});

// ---- Mahler denominators
struct RootInfo {
    Alg root;
    int multiplicity = 1;
    std::optional<long> unity_order;  // order when the root is a root of unity
};
struct DenominatorReport {
    bool zero_ideal = false;          // non-integral exponents: no polynomial relation of this shape
    AlgPoly candidate;                // monic, z-power stripped; a multiple of the true denominator
    std::optional<MahlerOperator> op; // annihilating operator the candidate comes from
    std::string provenance;
    std::vector<RootInfo> roots;
};
DenominatorReport mahler_denominator_candidate(const Puiseux& f, long p, int max_order = 3, int max_degree = 6);
DenominatorReport denominator_from_operator(const MahlerOperator& l);
GrowthClass classify_by_roots(const DenominatorReport& report, long p);

// ---- pullback [nu p^k]_*: z -> z^(nu p^k) with the matching rescaling of
// xi-indices, e_c and l.
MahlerOperator pullback(const MahlerOperator& l, long nu, long k);
GeneralizedSeries pullback(const GeneralizedSeries& g, long p, long nu, long k);
GeneralizedSeries inverse_pullback(const GeneralizedSeries& g, long p, long nu, long k);

// ---- purity
struct PurityOptions {
    int max_order = 3;
    int max_degree = 4;
    Rational precision = Rational(1030);  // precision of the solution basis
    EmpiricalOptions empirical;
};
struct PurityReport {
    GrowthClass input_class;
    long nu = 1, k = 0;
    MahlerOperator op;
    bool op_guessed = false;
    std::vector<GeneralizedSeries> basis;
    std::vector<GrowthClass> basis_classes;
    std::array<bool, 6> agree{};  // [r]: every basis element has the input's C_r status
    std::vector<std::string> warnings;
};
PurityReport purity_report(const GeneralizedSeries& f, long p, const PurityOptions& opt = {},
                           std::optional<MahlerOperator> supplied = std::nullopt);

}  // namespace mahler
