#pragma once

// Brute-force radial integrator used to check the closed forms.
//
// The radial equation is solved in x = ln r for w = u / sqrt(r),
//   w'' = g(x) w,   g = P^2 + 2m r^2 (coulomb / r + tail(r) - E),
// with Numerov steps on the lattice r_k = 10^{k / points_per_decade}. Every
// mesh is a window of that lattice so solutions on different meshes line up
// point by point.

#include "sae/sae_parameter.hpp"
#include "sae/singular.hpp"
#include "sae/spectra.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sae::oracle {

struct MeshSpec {
    int points_per_decade = 2000;
    double r_min = 0.0; // 0 picks 0.1 times the natural length, 1e-3 with a tail
    double r_max = 0.0; // 0 integrates until the decaying action reaches decay_action
    double decay_action = 40.0;
};

struct RadialSolution {
    std::vector<double> r;
    std::vector<double> u;
    double energy = 0.0;
    int node_count = 0;
    double a_st = 0.0;
    double a_add = 0.0;
    double norm = 0.0;            // int u^2 dr
    double matching_defect = 0.0; // ~ r (u_out'/u_out - u_in'/u_in) at r_match
    double r_match = 0.0;

    double p = 0.0;
    bool log_case = false;
    long k_first = 0; // lattice index of r.front()
    int points_per_decade = 0;
    RadialProblem problem;

    /// a_add / a_st; +inf when a_st vanishes.
    [[nodiscard]] double tau_fit() const;
};

/// Outward solution from r_min with boundary weights (cos theta, sin theta) on
/// the two Frobenius branches, inward solution from r_max, matched at the
/// outermost classically allowed point (or r_max / 3 if that is smaller).
RadialSolution integrate_radial(const RadialProblem& problem, double energy, const SAEParameter& tau,
                                const MeshSpec& mesh = {});

/// Copy scaled to int u^2 dr = 1.
RadialSolution normalized(const RadialSolution& solution);

/// int u1 u2 dr over the common part of the two meshes.
double overlap(const RadialSolution& s1, const RadialSolution& s2);

/// Frobenius coefficients of u = r^s (1 + c1 r + c2 r^2 + ...) for s = 1/2 + sign P.
struct FrobeniusStart {
    double exponent = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};
FrobeniusStart frobenius_coefficients(const RadialProblem& problem, double energy, int sign);

/// Sign changes of the outward solution between r_min and r_max: the number
/// of levels below `energy`.
int sturm_count(const RadialProblem& problem, double energy, const SAEParameter& tau, const MeshSpec& mesh);

/// Levels in (e_lo, e_hi) by bisection on the Sturm count, indexed by node
/// number. At most max_states are returned.
SpectrumResult find_levels(const RadialProblem& problem, const SAEParameter& tau, std::pair<double, double> window,
                           int max_states, const MeshSpec& mesh = {});

/// The `count` lowest levels with an automatically widened window.
SpectrumResult find_lowest_levels(const RadialProblem& problem, const SAEParameter& tau, int count,
                                  const MeshSpec& mesh = {});

/// Normalized eigenfunction at a known level.
RadialSolution eigenfunction(const RadialProblem& problem, const SAEParameter& tau, double energy,
                             const MeshSpec& mesh = {});

struct VirialReport {
    double expectation = 0.0;    // <V + r V'/2> without the inverse-square part
    double boundary_term = 0.0;  // (P^2/m) a_st a_add, or -a_add^2/(4m) for P = 0
    double generalized = 0.0;    // E - expectation - boundary_term
    double naive = 0.0;          // E - expectation
};

/// Requires a normalized solution.
VirialReport virial(const RadialSolution& solution, const RadialProblem& problem);

/// VirialReport::generalized.
double virial_residual(const RadialSolution& solution, const RadialProblem& problem);

/// Boundary form of m (E2 - E1) int u1 u2 dr:
///   P (a2_st a1_add - a1_st a2_add), or (a1_st a2_add - a2_st a1_add) / 2 for P = 0.
double orthogonality_defect(const RadialSolution& s1, const RadialSolution& s2);

enum class EquationKind { schrodinger, klein_gordon, dirac };
enum class BracketClass { identically_zero, nonzero };

std::string_view to_string(BracketClass c);

struct BracketResult {
    BracketClass kind = BracketClass::identically_zero;
    double limiting_power = 0.0; // power of r multiplying the coefficient combination
};

/// Limit at r -> 0 of the orthogonality bracket between two solutions with
/// leading powers (p_k, p_k'). For the second-order equations the bracket is
/// a Wronskian, which cancels identically when both solutions share a power;
/// for the two-component Dirac system f_k g_k' - f_k' g_k does not.
BracketResult boundary_bracket_class(std::pair<double, double> exponents, EquationKind kind);

struct E0Nodes {
    int count = 0;
    std::vector<double> radii;
};

/// Zero-energy solution with the given boundary data, integrated outward.
E0Nodes e0_nodes(const RadialProblem& problem, const SAEParameter& tau, const MeshSpec& mesh = {});
int e0_node_count(const RadialProblem& problem, const SAEParameter& tau, const MeshSpec& mesh = {});

struct SpacingReport {
    std::vector<double> energies;
    std::vector<double> gaps;
    double max_relative_deviation = 0.0; // max |gap_k / gap_0 - 1|
    bool equidistant = false;            // deviation below 1e-4
};

SpacingReport spacing_report(const RadialProblem& problem, const SAEParameter& tau, int n_levels,
                             const MeshSpec& mesh = {});

} // namespace sae::oracle
