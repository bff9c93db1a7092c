#include "sae/singular.hpp"

#include "sae/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sae {

namespace {

// 1/x^2 - 1/sinh^2 x
double inverse_square_minus_sinh(double x)
{
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return 1.0 / 3.0 + x2 * (-1.0 / 15.0 + x2 * (2.0 / 189.0 + x2 * (-1.0 / 675.0)));
    }
    const double s = std::sinh(x);
    return 1.0 / (x * x) - 1.0 / (s * s);
}

std::string format_number(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

Tail harmonic_tail(double g)
{
    return Tail{"harmonic:" + format_number(g), [g](double r) { return g * r * r; }, 0.0};
}

Tail sinh_squared_tail(double a, double v0)
{
    if (!(a > 0.0)) {
        throw DomainError("sinh_squared_tail: a must be positive");
    }
    // -v0 a^2/sinh^2(ar) + v0/r^2 = v0 a^2 (1/x^2 - 1/sinh^2 x), x = a r
    return Tail{"sinh2:" + format_number(a),
                [a, v0](double r) { return v0 * a * a * inverse_square_minus_sinh(a * r); },
                v0 * a * a / 3.0};
}

void validate(const RadialProblem& problem)
{
    if (!(problem.m > 0.0) || !std::isfinite(problem.m)) {
        throw DomainError("mass must be positive and finite");
    }
    if (problem.l < 0) {
        throw DomainError("angular momentum l must be a non-negative integer");
    }
    if (!std::isfinite(problem.v0) || !std::isfinite(problem.coulomb)) {
        throw DomainError("v0 and coulomb must be finite");
    }
    if (problem.tail) {
        if (!problem.tail->potential) {
            throw DomainError("tail has no potential function");
        }
        for (double r : {1e-6, 1e-8}) {
            const double v = problem.tail->potential(r);
            if (!std::isfinite(v) || std::abs(r * r * v) > 1e-6) {
                throw DomainError("tail '" + problem.tail->description +
                                  "' is not regular at the origin (r^2 V does not vanish)");
            }
        }
    }
}

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::standard_only: return "STANDARD_ONLY";
    case Regime::two_branch: return "TWO_BRANCH";
    case Regime::log_case: return "LOG_CASE";
    case Regime::fall_to_center: return "FALL_TO_CENTER";
    }
    return "?";
}

SingularityAnalysis analyze(const RadialProblem& problem)
{
    SingularityAnalysis a;
    const double l = problem.l;
    const double two_m_v0 = 2.0 * problem.m * problem.v0;
    a.gamma = two_m_v0 - l * (l + 1.0);
    a.p_squared = (l + 0.5) * (l + 0.5) - two_m_v0;

    if (std::abs(a.p_squared) <= kLogCaseTolerance) {
        a.p = 0.0;
        a.regime = Regime::log_case;
        a.exponent_kind = ExponentKind::log_pair;
        a.exponents = {0.5, 0.5};
    } else if (a.p_squared < 0.0) {
        a.imag_p = std::sqrt(-a.p_squared);
        a.regime = Regime::fall_to_center;
        a.exponent_kind = ExponentKind::oscillatory_pair;
        a.exponents = {0.5, 0.5};
    } else {
        const double p = std::sqrt(a.p_squared);
        a.p = p;
        a.exponents = {0.5 + p, 0.5 - p};
        // same comparison as additional_exists so the two never disagree
        a.regime = a.gamma > 0.0 ? Regime::two_branch : Regime::standard_only;
    }
    a.anti_centrifugal = a.regime == Regime::two_branch;
    return a;
}

bool additional_exists(const RadialProblem& problem)
{
    const double l = problem.l;
    const double two_m_v0 = 2.0 * problem.m * problem.v0;
    const double p_squared = (l + 0.5) * (l + 0.5) - two_m_v0;
    return two_m_v0 > l * (l + 1.0) && p_squared > kLogCaseTolerance;
}

std::string_view to_string(SolutionBranch branch)
{
    switch (branch) {
    case SolutionBranch::standard: return "standard";
    case SolutionBranch::additional: return "additional";
    case SolutionBranch::oscillatory: return "oscillatory";
    }
    return "?";
}

std::string_view to_string(Convergence c)
{
    return c == Convergence::converges ? "converges" : "diverges";
}

Convergence kinetic_convergence(const SingularityAnalysis& analysis, SolutionBranch branch)
{
    // R ~ r^{s-1}: (dR/dr)^2 r^2 ~ r^{2s-2}, integrable at 0 iff 2s - 2 > -1.
    switch (analysis.regime) {
    case Regime::fall_to_center:
        if (branch != SolutionBranch::oscillatory) {
            throw RegimeError("only oscillatory branches exist in the fall-to-center regime");
        }
        return Convergence::diverges; // Re s = 1/2
    case Regime::log_case:
        if (branch == SolutionBranch::oscillatory) {
            throw RegimeError("no oscillatory branch outside the fall-to-center regime");
        }
        return Convergence::diverges; // s = 1/2, plus a logarithm
    case Regime::standard_only:
        if (branch != SolutionBranch::standard) {
            throw RegimeError("only the standard branch is admissible for P >= 1/2");
        }
        break;
    case Regime::two_branch:
        if (branch == SolutionBranch::oscillatory) {
            throw RegimeError("no oscillatory branch outside the fall-to-center regime");
        }
        break;
    }
    const double s = branch == SolutionBranch::standard ? analysis.exponents[0] : analysis.exponents[1];
    return 2.0 * s - 2.0 > -1.0 ? Convergence::converges : Convergence::diverges;
}

QuantumDefect quantum_defect(const RadialProblem& problem)
{
    if (!(problem.coulomb < 0.0)) {
        throw RegimeError("quantum defect requires an attractive Coulomb term (coulomb < 0)");
    }
    const double l = problem.l;
    const double half = l + 0.5;
    const double two_m_v0 = 2.0 * problem.m * problem.v0;

    QuantumDefect q;
    q.delta_l = -two_m_v0 / (2.0 * l + 1.0);
    q.expansion_valid = std::abs(two_m_v0) < 0.1 * half * half;
    q.additional_exists = additional_exists(problem);

    const SingularityAnalysis a = analyze(problem);
    if (a.p) {
        q.exact_defect = half - *a.p;
        const double mag = std::abs(q.exact_defect);
        q.additional_possible = l < mag && mag < l + 1.0;
    } else {
        q.exact_defect = std::numeric_limits<double>::quiet_NaN();
        q.additional_possible = false;
    }
    q.consistent = q.additional_possible == q.additional_exists;
    return q;
}

double e0_node_radius(double a_st, double a_add, double p)
{
    if (!(p > 0.0 && p < 0.5)) {
        throw DomainError("e0_node_radius: P must lie in (0, 1/2)");
    }
    if (!(a_st * a_add < 0.0)) {
        throw DomainError("e0_node_radius: coefficients must have opposite signs for a real zero");
    }
    return std::pow(-a_add / a_st, 1.0 / (2.0 * p));
}

std::string_view to_string(GiriRegion region)
{
    switch (region) {
    case GiriRegion::single_level_region: return "single_level_region";
    case GiriRegion::no_bound_state_region: return "no_bound_state_region";
    case GiriRegion::fall_region: return "fall_region";
    }
    return "?";
}

GiriRegion giri_g_classify(double g)
{
    if (g <= -0.25) {
        return GiriRegion::fall_region;
    }
    if (g < 0.0) {
        return GiriRegion::single_level_region;
    }
    return GiriRegion::no_bound_state_region;
}

} // namespace sae
