#pragma once

// Closed-form and transcendental bound-state spectra.
//
// Attractive Coulomb problems (coulomb = -alpha < 0) are solved in the
// dimensionless lambda = 2 m alpha / sqrt(-8 m E), i.e. E = -m alpha^2 / (2 lambda^2).

#include "sae/sae_parameter.hpp"
#include "sae/singular.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sae {

enum class Branch { standard, additional, mixed, fall_tower };
enum class Source { closed_form, transcendental, oracle };

std::string_view to_string(Branch branch);
std::string_view to_string(Source source);

struct BoundState {
    double energy = 0.0;
    int n_r = 0; // tower index for fall_tower, may be negative
    Branch branch = Branch::standard;
    std::optional<double> lambda;
    Source source = Source::closed_form;
    std::optional<int> node_count;
};

struct SpectrumResult {
    RadialProblem problem;
    SAEParameter tau;
    std::vector<BoundState> states; // ascending energy
    std::vector<std::string> diagnostics;
    std::vector<std::pair<std::string, double>> metadata;
};

/// Gamma(1 - 2P) / Gamma(1 + 2P).
double reflection_ratio(double p);

/// lambda = 1/2 + n_r +- P and E = -m alpha^2 / (2 lambda^2); + standard, - additional.
SpectrumResult closed_levels(const RadialProblem& problem, Branch branch, int n_max);

/// Gamma(1/2 - lambda - P) / Gamma(1/2 - lambda + P). Zeros at 1/2 + P + n,
/// poles at 1/2 - P + n.
double fp_lambda(double p, double lambda);

/// -tau Gamma(1-2P)/Gamma(1+2P) (2 m alpha)^{2P} lambda^{-2P}; tau finite.
double qp_lambda(double p, double lambda, const SAEParameter& tau, double m, double alpha);

/// First `count` roots of fp_lambda = qp_lambda, one per bracket between
/// consecutive poles and zeros. tau = 0 and tau = inf use closed_levels.
///
/// For tau < 0 the lowest root lies in (0, 1/2 - P); it is the continuation of
/// the single inverse-square level and moves to lambda -> 0 as tau -> 0-.
SpectrumResult solve_attractive_coulomb(const RadialProblem& problem, const SAEParameter& tau, int count);

/// Single level of -v0/r^2 alone. Empty for tau = 0 and tau = inf, throws
/// DomainError for tau > 0.
std::optional<BoundState> inverse_square_level(const RadialProblem& problem, const SAEParameter& tau);

/// Inverse of inverse_square_level.
SAEParameter tau_from_energy(const RadialProblem& problem, double energy);

/// E_n = -eta_n^2 / (2m), eta_n = exp((C - (n + 1/2) pi) / s), n in [n_lo, n_hi].
SpectrumResult fall_spectrum(const RadialProblem& problem, double c, int n_lo, int n_hi);

/// Left side of the repulsive-Coulomb equation in lambda,
///   L(lambda) = Gamma(1/2 + lambda - P) / Gamma(1/2 + lambda + P) (lambda / (2 m alpha))^{2P},
/// which rises from 0 and approaches (2 m alpha)^{-2P}.
double repulsive_left_side(double p, double lambda, double m, double alpha);

struct RepulsiveThreshold {
    double plateau = 0.0;           // L at the end of the scan
    double plateau_formula = 0.0;   // (2 m alpha)^{-2P}
    double sup_left = 0.0;          // max of L over the scan
    double printed_tau0 = 0.0;      // (2 m alpha)^{-P} Gamma(1+2P)/Gamma(1-2P)
    double tau_lower = 0.0;         // levels exist for tau in (tau_lower, tau_upper)
    double tau_upper = 0.0;
    double lambda_max = 0.0;

    [[nodiscard]] bool at_least_one_level(const SAEParameter& tau) const;
};

RepulsiveThreshold repulsive_threshold(const RadialProblem& problem);

/// Roots in lambda of L(lambda) = -tau Gamma(1-2P)/Gamma(1+2P) by scan and
/// bisection. Empty for tau = 0 and tau = inf.
SpectrumResult solve_repulsive_coulomb(const RadialProblem& problem, const SAEParameter& tau, int count);

struct KgTwoParticleResult {
    SpectrumResult spectrum; // energy holds the binding M - 2m
    std::vector<double> masses;
    double p = 0.0;
    double tau0_plateau = 0.0;  // -(m(V0+S0))^{-2P} Gamma(1+2P)/Gamma(1-2P)
    double tau_lower = 0.0;     // range of -L/R over the M window
    double tau_upper = 0.0;
};

/// Two-particle Klein-Gordon problem with vector V0/r and scalar S0/r
/// couplings: roots in M in (0, 2m) of
///   Gamma(1/2+lambda-P)/Gamma(1/2+lambda+P) (4m^2 - M^2)^{-P} = -tau Gamma(1-2P)/Gamma(1+2P),
///   lambda(M) = (M V0/2 + m S0) / sqrt(4m^2 - M^2).
KgTwoParticleResult kg_two_particle(double v0, double s0, double m, const SAEParameter& tau, int l = 0);

/// lambda(M) of the two-particle problem.
double kg_two_particle_lambda(double v0, double s0, double m, double mass);

struct KgHydrogenMap {
    RadialProblem effective; // m = 1/2, v0 = alpha^2, coulomb = -2 E alpha
    double effective_energy = 0.0; // E^2 - m^2
    double p = 0.0;
    Regime regime = Regime::standard_only;
};

/// Maps the one-particle Klein-Gordon Coulomb problem at energy E onto the
/// nonrelativistic template.
KgHydrogenMap kg_hydrogen_map(double alpha_fs, int l, double energy, double m);

struct KgHydrogenLevel {
    double energy = 0.0; // total, in (0, m)
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped fixed point E <- (1-w) E + w m / sqrt(1 + alpha^2 / lambda(E)^2),
/// w = 1/2, for the n_r-th level at the given tau. lambda depends on E only
/// through the effective Coulomb strength when tau is finite and nonzero.
KgHydrogenLevel kg_hydrogen_level(double alpha_fs, int l, double m, const SAEParameter& tau, int n_r);

/// B_s(eta) = -(2 eta)^{-2s} Gamma(1+2s) Gamma(1/2 - s - g/eta) / [Gamma(1-2s) Gamma(1/2 + s - g/eta)].
/// Poles at eta = g / (n + 1/2 - s), zeros at eta = g / (n + 1/2 + s).
/// With g = m alpha and eta = sqrt(-2 m E) it equals the tau that makes E a level.
double scarf_b(double s, double gamma_c, double eta);

/// -1 < 1/2 - P - lambda(E) < 0.
bool ground_state_window(double energy, const RadialProblem& problem);

/// Copy of `result` with n_r = 0 states that fail ground_state_window removed.
SpectrumResult window_filtered(const SpectrumResult& result);

} // namespace sae
