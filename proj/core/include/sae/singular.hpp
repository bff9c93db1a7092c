#pragma once

// Radial problems with an r^-2 singularity at the origin and their
// near-origin (Frobenius) classification.
//
// Units: hbar = 1. The radial equation for u = r R is
//   u'' + [2m(E - V(r)) - l(l+1)/r^2] u = 0,
//   V(r) = -v0/r^2 + coulomb/r + tail(r).

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sae {

/// Regular extra potential, lim r^2 tail(r) = 0 at the origin.
struct Tail {
    std::string description;
    std::function<double(double)> potential;
    /// Limit of tail(r) at r -> 0, used by the Frobenius start.
    double origin_value = 0.0;
};

/// g r^2 (singular oscillator when combined with v0).
Tail harmonic_tail(double g);

/// Difference between -v0 a^2 / sinh^2(a r) and the bare -v0/r^2 term, so a
/// problem carrying v0 and this tail has the full sinh^-2 potential.
Tail sinh_squared_tail(double a, double v0);

struct RadialProblem {
    double m = 1.0;
    int l = 0;
    double v0 = 0.0;      // V contains -v0/r^2
    double coulomb = 0.0; // V contains +coulomb/r
    std::optional<Tail> tail;
};

/// Throws DomainError for m <= 0, l < 0, non-finite strengths, or a tail that
/// fails the r^2 V -> 0 test at r = 1e-6 and 1e-8.
void validate(const RadialProblem& problem);

enum class Regime { standard_only, two_branch, log_case, fall_to_center };

std::string_view to_string(Regime regime);

enum class ExponentKind { power_pair, log_pair, oscillatory_pair };

/// |P^2| below this is treated as the logarithmic case.
inline constexpr double kLogCaseTolerance = 1e-12;

struct SingularityAnalysis {
    double gamma = 0.0;     // 2 m v0 - l(l+1)
    double p_squared = 0.0; // (l + 1/2)^2 - 2 m v0
    std::optional<double> p;
    std::optional<double> imag_p;
    /// Real parts of the two indicial exponents; for the oscillatory pair the
    /// exponents are 1/2 +- i imag_p.
    std::array<double, 2> exponents{0.5, 0.5};
    ExponentKind exponent_kind = ExponentKind::power_pair;
    Regime regime = Regime::standard_only;
    bool anti_centrifugal = false;
};

SingularityAnalysis analyze(const RadialProblem& problem);

/// l(l+1) < 2 m v0 < l(l+1) + 1/4, with the P = 0 point excluded.
bool additional_exists(const RadialProblem& problem);

enum class SolutionBranch { standard, additional, oscillatory };
enum class Convergence { converges, diverges };

std::string_view to_string(SolutionBranch branch);
std::string_view to_string(Convergence c);

/// Convergence of int (dR/dr)^2 r^2 dr at the origin for one branch.
/// Throws RegimeError when the branch does not exist in the regime.
Convergence kinetic_convergence(const SingularityAnalysis& analysis, SolutionBranch branch);

struct QuantumDefect {
    double delta_l = 0.0;       // -2 m v0 / (2l + 1)
    double exact_defect = 0.0;  // l + 1/2 - P
    bool expansion_valid = false;
    bool additional_possible = false; // l < |exact_defect| < l + 1
    bool additional_exists = false;   // interval form, for comparison
    bool consistent = true;
};

/// Rydberg correction of an attractive Coulomb problem. The existence test is
/// evaluated on the magnitude of the exact defect l + 1/2 - P and compared with
/// additional_exists; disagreement is reported in `consistent`.
QuantumDefect quantum_defect(const RadialProblem& problem);

/// Zero of a_st r^{1/2+P} + a_add r^{1/2-P}. Requires opposite signs.
double e0_node_radius(double a_st, double a_add, double p);

enum class GiriRegion { single_level_region, no_bound_state_region, fall_region };

std::string_view to_string(GiriRegion region);

/// Classification in the coupling g of the radial reduction, P = sqrt(1/4 + g).
GiriRegion giri_g_classify(double g);

} // namespace sae
