#include "sae/spectra.hpp"

#include "sae/errors.hpp"
#include "sae/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace sae {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string describe(double x)
{
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

double require_two_branch(const RadialProblem& problem, const char* what)
{
    validate(problem);
    const SingularityAnalysis a = analyze(problem);
    if (a.regime != Regime::two_branch) {
        throw RegimeError(std::string(what) + " requires the TWO_BRANCH regime (0 < P < 1/2), got " +
                          std::string(to_string(a.regime)));
    }
    return *a.p;
}

struct RootResult {
    double x = 0.0;
    int iterations = 0;
};

// Bisection on a sign change of f over [lo, hi], f(lo) < 0 < f(hi) or the
// reverse. Geometric midpoints while the bracket spans more than a factor 4.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi)
{
    const bool lo_negative = f(lo) < 0.0;
    RootResult r;
    for (r.iterations = 0; r.iterations < 4000; ++r.iterations) {
        const double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= 4.0 * kEps * std::max(std::abs(lo), std::abs(hi))) {
            break;
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r.x = 0.5 * (lo + hi);
    return r;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Move an open-interval endpoint inward until f has the expected sign there.
// Returns false if even the smallest offset fails.
bool shrink_to_sign(const std::function<double(double)>& f, double& x, double direction, double expected)
{
    const double base = x;
    for (double rel : {1e-9, 1e-11, 1e-13, 1e-14}) {
        const double trial = base + direction * rel * std::max(1.0, std::abs(base));
        double value = 0.0;
        try {
            value = f(trial);
        } catch (const PoleError&) {
            continue;
        }
        if (std::isfinite(value) && sign_of(value) == expected) {
            x = trial;
            return true;
        }
    }
    return false;
}

double coulomb_energy(double m, double alpha, double lambda) { return -m * alpha * alpha / (2.0 * lambda * lambda); }

// Logarithmic lambda grid from lo to hi, `per_decade` points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade)
{
    const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    std::vector<double> g(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    }
    g.back() = hi;
    return g;
}

} // namespace

std::string_view to_string(Branch branch)
{
    switch (branch) {
    case Branch::standard: return "standard";
    case Branch::additional: return "additional";
    case Branch::mixed: return "mixed";
    case Branch::fall_tower: return "fall_tower";
    }
    return "?";
}

std::string_view to_string(Source source)
{
    switch (source) {
    case Source::closed_form: return "closed_form";
    case Source::transcendental: return "transcendental";
    case Source::oracle: return "oracle";
    }
    return "?";
}

double reflection_ratio(double p) { return specfun::gamma_ratio(1.0 - 2.0 * p, 1.0 + 2.0 * p); }

SpectrumResult closed_levels(const RadialProblem& problem, Branch branch, int n_max)
{
    validate(problem);
    if (!(problem.coulomb < 0.0)) {
        throw RegimeError("closed_levels requires an attractive Coulomb term (coulomb < 0)");
    }
    if (branch != Branch::standard && branch != Branch::additional) {
        throw DomainError("closed_levels: branch must be standard or additional");
    }
    if (n_max < 0) {
        throw DomainError("closed_levels: n_max must be non-negative");
    }
    const SingularityAnalysis a = analyze(problem);
    if (a.regime == Regime::fall_to_center || a.regime == Regime::log_case) {
        throw RegimeError("closed_levels: no power-law branches in the " + std::string(to_string(a.regime)) +
                          " regime");
    }
    if (branch == Branch::additional && !additional_exists(problem)) {
        throw RegimeError("additional branch unavailable: requires l(l+1) < 2 m v0 < l(l+1) + 1/4");
    }
    const double p = *a.p;
    const double alpha = -problem.coulomb;
    const double sign = branch == Branch::standard ? 1.0 : -1.0;

    SpectrumResult out;
    out.problem = problem;
    out.tau = branch == Branch::standard ? SAEParameter::standard() : SAEParameter::additional();
    for (int n = 0; n <= n_max; ++n) {
        const double lambda = 0.5 + n + sign * p;
        BoundState s;
        s.lambda = lambda;
        s.energy = coulomb_energy(problem.m, alpha, lambda);
        s.n_r = n;
        s.branch = branch;
        s.source = Source::closed_form;
        out.states.push_back(s);
    }
    if (branch == Branch::additional && !ground_state_window(out.states.front().energy, problem)) {
        out.diagnostics.push_back("n_r=0 additional level lies outside the ground-state window");
    }
    return out;
}

double fp_lambda(double p, double lambda)
{
    if (!(p > 0.0 && p < 0.5)) {
        throw DomainError("fp_lambda: P must lie in (0, 1/2)");
    }
    return specfun::gamma_ratio(0.5 - lambda - p, 0.5 - lambda + p);
}

double qp_lambda(double p, double lambda, const SAEParameter& tau, double m, double alpha)
{
    if (!tau.is_finite()) {
        throw DomainError("qp_lambda: tau must be finite");
    }
    if (tau.is_standard()) {
        return 0.0;
    }
    return -tau.tau() * reflection_ratio(p) * std::pow(2.0 * m * alpha, 2.0 * p) * std::pow(lambda, -2.0 * p);
}

SpectrumResult solve_attractive_coulomb(const RadialProblem& problem, const SAEParameter& tau, int count)
{
    if (!(problem.coulomb < 0.0)) {
        throw RegimeError("solve_attractive_coulomb requires coulomb < 0");
    }
    const double p = require_two_branch(problem, "solve_attractive_coulomb");
    if (count <= 0) {
        throw DomainError("count must be positive");
    }
    if (tau.is_standard()) {
        return closed_levels(problem, Branch::standard, count - 1);
    }
    if (tau.is_additional()) {
        return closed_levels(problem, Branch::additional, count - 1);
    }

    const double alpha = -problem.coulomb;
    const double m = problem.m;
    const auto g = [&](double lambda) { return fp_lambda(p, lambda) - qp_lambda(p, lambda, tau, m, alpha); };
    const double t = tau.tau();

    SpectrumResult out;
    out.problem = problem;
    out.tau = tau;

    for (int k = 0; k < count; ++k) {
        double lo = 0.0;
        double hi = 0.0;
        bool ok = true;
        if (t < 0.0) {
            hi = 0.5 - p + k; // pole: g -> +inf from the left
            ok = shrink_to_sign(g, hi, -1.0, 1.0);
            if (k == 0) {
                lo = std::min(1e-3, 0.5 * hi);
                while (g(lo) >= 0.0 && lo > 1e-290) {
                    lo *= 1e-4;
                }
                ok = ok && g(lo) < 0.0;
            } else {
                lo = 0.5 + p + (k - 1); // zero of F, where g = -Q < 0
                ok = ok && shrink_to_sign(g, lo, 1.0, -1.0);
            }
        } else {
            lo = 0.5 - p + k; // pole: g -> -inf from the right
            hi = 0.5 + p + k; // zero of F, where g = -Q > 0
            ok = shrink_to_sign(g, lo, 1.0, -1.0) && shrink_to_sign(g, hi, -1.0, 1.0);
        }
        if (!ok) {
            // The root sits closer to a pole than can be resolved; report it there.
            const double pole = 0.5 - p + k;
            out.diagnostics.push_back("root " + std::to_string(k) + ": unresolved next to pole " + describe(pole));
            BoundState s;
            s.lambda = pole;
            s.energy = coulomb_energy(m, alpha, pole);
            s.n_r = k;
            s.branch = Branch::mixed;
            s.source = Source::transcendental;
            out.states.push_back(s);
            continue;
        }
        const RootResult root = bisect(g, lo, hi);
        BoundState s;
        s.lambda = root.x;
        s.energy = coulomb_energy(m, alpha, root.x);
        s.n_r = k;
        s.branch = Branch::mixed;
        s.source = Source::transcendental;
        out.states.push_back(s);
        out.diagnostics.push_back("root " + std::to_string(k) + ": bracket [" + describe(lo) + ", " + describe(hi) +
                                  "], " + std::to_string(root.iterations) + " bisection steps");
    }
    if (!out.states.empty() && !ground_state_window(out.states.front().energy, problem)) {
        out.diagnostics.push_back("n_r=0 root lambda=" + describe(*out.states.front().lambda) +
                                  " lies outside the ground-state window");
    }
    return out;
}

std::optional<BoundState> inverse_square_level(const RadialProblem& problem, const SAEParameter& tau)
{
    if (problem.coulomb != 0.0 || problem.tail) {
        throw RegimeError("inverse_square_level requires a pure inverse-square potential");
    }
    const double p = require_two_branch(problem, "inverse_square_level");
    if (tau.is_standard() || tau.is_additional()) {
        return std::nullopt;
    }
    if (tau.tau() > 0.0) {
        throw DomainError("inverse_square_level: a real level requires tau < 0");
    }
    const double g = specfun::gamma_ratio(1.0 + p, 1.0 - p);
    BoundState s;
    s.energy = -(2.0 / problem.m) * std::pow(g / -tau.tau(), 1.0 / p);
    s.n_r = 0;
    s.branch = Branch::mixed;
    s.source = Source::closed_form;
    return s;
}

SAEParameter tau_from_energy(const RadialProblem& problem, double energy)
{
    if (problem.coulomb != 0.0 || problem.tail) {
        throw RegimeError("tau_from_energy requires a pure inverse-square potential");
    }
    const double p = require_two_branch(problem, "tau_from_energy");
    if (!(energy < 0.0)) {
        throw DomainError("tau_from_energy: energy must be negative");
    }
    const double k = std::sqrt(-2.0 * problem.m * energy);
    const double g = specfun::gamma_ratio(1.0 + p, 1.0 - p);
    return SAEParameter::from_tau(-g * std::pow(2.0 / k, 2.0 * p));
}

SpectrumResult fall_spectrum(const RadialProblem& problem, double c, int n_lo, int n_hi)
{
    validate(problem);
    const SingularityAnalysis a = analyze(problem);
    if (a.regime != Regime::fall_to_center) {
        throw RegimeError("fall_spectrum requires the FALL_TO_CENTER regime");
    }
    if (problem.coulomb != 0.0 || problem.tail) {
        throw RegimeError("fall_spectrum requires a pure inverse-square potential");
    }
    if (n_lo > n_hi) {
        throw DomainError("fall_spectrum: empty index range");
    }
    const double s = *a.imag_p;
    SpectrumResult out;
    out.problem = problem;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double eta = std::exp((c - (n + 0.5) * std::numbers::pi) / s);
        BoundState st;
        st.energy = -eta * eta / (2.0 * problem.m);
        st.n_r = n;
        st.branch = Branch::fall_tower;
        st.source = Source::closed_form;
        out.states.push_back(st);
    }
    out.metadata.emplace_back("s", s);
    out.metadata.emplace_back("C", c);
    return out;
}

double repulsive_left_side(double p, double lambda, double m, double alpha)
{
    return specfun::gamma_ratio(0.5 + lambda - p, 0.5 + lambda + p) * std::pow(lambda / (2.0 * m * alpha), 2.0 * p);
}

namespace {

// Upper end of the lambda scan: the plateau is reached within 0.1 %, then one
// more decade.
double repulsive_lambda_max(double p, double m, double alpha)
{
    const double plateau = std::pow(2.0 * m * alpha, -2.0 * p);
    double lambda = 10.0;
    while (lambda < 1e12 && std::abs(repulsive_left_side(p, lambda, m, alpha) / plateau - 1.0) > 1e-3) {
        lambda *= 2.0;
    }
    return 10.0 * lambda;
}

} // namespace

bool RepulsiveThreshold::at_least_one_level(const SAEParameter& tau) const
{
    return tau.is_finite() && tau.tau() > tau_lower && tau.tau() < tau_upper;
}

RepulsiveThreshold repulsive_threshold(const RadialProblem& problem)
{
    if (!(problem.coulomb > 0.0)) {
        throw RegimeError("repulsive_threshold requires coulomb > 0");
    }
    const double p = require_two_branch(problem, "repulsive_threshold");
    const double m = problem.m;
    const double alpha = problem.coulomb;
    const double r = reflection_ratio(p);

    RepulsiveThreshold th;
    th.lambda_max = repulsive_lambda_max(p, m, alpha);
    th.plateau = repulsive_left_side(p, th.lambda_max, m, alpha);
    th.plateau_formula = std::pow(2.0 * m * alpha, -2.0 * p);
    th.printed_tau0 = std::pow(2.0 * m * alpha, -p) / r;

    const std::vector<double> grid = log_grid(1e-8, th.lambda_max, 200);
    std::size_t best = 0;
    double sup = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = repulsive_left_side(p, grid[i], m, alpha);
        if (v > sup) {
            sup = v;
            best = i;
        }
    }
    if (best > 0 && best + 1 < grid.size()) {
        // Golden-section refinement of an interior maximum.
        double a = grid[best - 1];
        double b = grid[best + 1];
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
            const double c = b - phi * (b - a);
            const double d = a + phi * (b - a);
            if (repulsive_left_side(p, c, m, alpha) > repulsive_left_side(p, d, m, alpha)) {
                b = d;
            } else {
                a = c;
            }
        }
        sup = std::max(sup, repulsive_left_side(p, 0.5 * (a + b), m, alpha));
    }
    th.sup_left = std::max(sup, th.plateau_formula);
    th.tau_lower = -th.sup_left / r;
    th.tau_upper = 0.0;
    return th;
}

SpectrumResult solve_repulsive_coulomb(const RadialProblem& problem, const SAEParameter& tau, int count)
{
    if (!(problem.coulomb > 0.0)) {
        throw RegimeError("solve_repulsive_coulomb requires coulomb > 0");
    }
    const double p = require_two_branch(problem, "solve_repulsive_coulomb");
    if (count <= 0) {
        throw DomainError("count must be positive");
    }
    const double m = problem.m;
    const double alpha = problem.coulomb;
    const RepulsiveThreshold th = repulsive_threshold(problem);

    SpectrumResult out;
    out.problem = problem;
    out.tau = tau;
    out.metadata.emplace_back("plateau_computed", th.plateau);
    out.metadata.emplace_back("plateau_formula", th.plateau_formula);
    out.metadata.emplace_back("sup_left_side", th.sup_left);
    out.metadata.emplace_back("tau_admissible_lower", th.tau_lower);
    out.metadata.emplace_back("tau_admissible_upper", th.tau_upper);
    out.metadata.emplace_back("tau0_printed", th.printed_tau0);

    if (!tau.is_finite() || tau.is_standard()) {
        out.diagnostics.push_back("no levels for tau = 0 or tau = inf");
        return out;
    }
    const double target = -tau.tau() * reflection_ratio(p);
    if (!(target > 0.0)) {
        out.diagnostics.push_back("left side is positive; no levels for tau > 0");
        return out;
    }
    // Below the small-lambda asymptote L ~ c lambda^{2P} the equation has no roots.
    const double c0 = specfun::gamma_ratio(0.5 - p, 0.5 + p) * std::pow(2.0 * m * alpha, -2.0 * p);
    const double lambda_small = std::pow(target / c0, 1.0 / (2.0 * p));
    const double lo = std::min(1e-6, 1e-3 * lambda_small);
    const auto f = [&](double lambda) { return repulsive_left_side(p, lambda, m, alpha) - target; };

    const std::vector<double> grid = log_grid(lo, th.lambda_max, 200);
    double prev = f(grid.front());
    std::vector<double> roots;
    for (std::size_t i = 1; i < grid.size() && static_cast<int>(roots.size()) < count; ++i) {
        const double cur = f(grid[i]);
        if ((prev < 0.0) != (cur < 0.0)) {
            roots.push_back(bisect(f, grid[i - 1], grid[i]).x);
        }
        prev = cur;
    }
    if (roots.empty()) {
        out.diagnostics.push_back("no sign change of L(lambda) + tau R on (" + describe(lo) + ", " +
                                  describe(th.lambda_max) + ")");
    }
    for (std::size_t k = 0; k < roots.size(); ++k) {
        BoundState s;
        s.lambda = roots[k];
        s.energy = coulomb_energy(m, alpha, roots[k]);
        s.n_r = static_cast<int>(k);
        s.branch = Branch::mixed;
        s.source = Source::transcendental;
        out.states.push_back(s);
    }
    return out;
}

double kg_two_particle_lambda(double v0, double s0, double m, double mass)
{
    return (mass * v0 / 2.0 + m * s0) / std::sqrt(4.0 * m * m - mass * mass);
}

KgTwoParticleResult kg_two_particle(double v0, double s0, double m, const SAEParameter& tau, int l)
{
    if (!(m > 0.0) || v0 < 0.0 || s0 < 0.0 || l < 0) {
        throw DomainError("kg_two_particle: requires m > 0, V0 >= 0, S0 >= 0, l >= 0");
    }
    if (v0 == 0.0 && s0 == 0.0) {
        throw DomainError("kg_two_particle: V0 = S0 = 0 is the free two-particle problem");
    }
    const double half = l + 0.5;
    const double p2 = half * half + (s0 * s0 - v0 * v0) / 4.0;
    if (!(p2 > 0.0) || !(std::sqrt(p2) < 0.5)) {
        throw DomainError("kg_two_particle: P = " + describe(p2 > 0.0 ? std::sqrt(p2) : 0.0) +
                          " outside (0, 1/2)");
    }
    const double p = std::sqrt(p2);
    const double r = reflection_ratio(p);

    KgTwoParticleResult res;
    res.p = p;
    res.tau0_plateau = -std::pow(m * (v0 + s0), -2.0 * p) / r;
    res.spectrum.problem = RadialProblem{m, l, 0.0, 0.0, std::nullopt};
    res.spectrum.tau = tau;

    // Binding d = 2m - M on a geometric grid in (0, 2m).
    const auto left = [&](double d) {
        const double mass = 2.0 * m - d;
        const double lambda = kg_two_particle_lambda(v0, s0, m, mass);
        return specfun::gamma_ratio(0.5 + lambda - p, 0.5 + lambda + p) * std::pow(4.0 * m * m - mass * mass, -p);
    };
    const std::vector<double> grid = log_grid(2.0 * m * 1e-10, 2.0 * m * (1.0 - 1e-9), 200);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = left(grid[i]);
    }
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    res.tau_lower = -*mx / r;
    res.tau_upper = -*mn / r;
    res.spectrum.metadata.emplace_back("P", p);
    res.spectrum.metadata.emplace_back("tau0_plateau", res.tau0_plateau);
    res.spectrum.metadata.emplace_back("tau_range_lower", res.tau_lower);
    res.spectrum.metadata.emplace_back("tau_range_upper", res.tau_upper);

    if (!tau.is_finite() || tau.is_standard()) {
        res.spectrum.diagnostics.push_back("no levels for tau = 0 or tau = inf");
        return res;
    }
    const double target = -tau.tau() * r;
    const auto f = [&](double d) { return left(d) - target; };
    std::vector<double> binding;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if ((values[i - 1] < target) != (values[i] < target)) {
            binding.push_back(bisect(f, grid[i - 1], grid[i]).x);
        }
    }
    std::sort(binding.begin(), binding.end(), std::greater<>());
    for (std::size_t k = 0; k < binding.size(); ++k) {
        const double mass = 2.0 * m - binding[k];
        BoundState s;
        s.energy = -binding[k];
        s.lambda = kg_two_particle_lambda(v0, s0, m, mass);
        s.n_r = static_cast<int>(k);
        s.branch = Branch::mixed;
        s.source = Source::transcendental;
        res.spectrum.states.push_back(s);
        res.masses.push_back(mass);
    }
    if (binding.empty()) {
        res.spectrum.diagnostics.push_back("no root for M in (0, 2m)");
    }
    return res;
}

KgHydrogenMap kg_hydrogen_map(double alpha_fs, int l, double energy, double m)
{
    if (l < 0 || !(m > 0.0)) {
        throw DomainError("kg_hydrogen_map: requires l >= 0 and m > 0");
    }
    KgHydrogenMap map;
    map.effective = RadialProblem{0.5, l, alpha_fs * alpha_fs, -2.0 * energy * alpha_fs, std::nullopt};
    map.effective_energy = energy * energy - m * m;
    const SingularityAnalysis a = analyze(map.effective);
    if (a.regime == Regime::fall_to_center) {
        throw RegimeError("kg_hydrogen_map: alpha^2 > (l + 1/2)^2 falls to the center");
    }
    map.regime = a.regime;
    map.p = a.p.value_or(0.0);
    return map;
}

KgHydrogenLevel kg_hydrogen_level(double alpha_fs, int l, double m, const SAEParameter& tau, int n_r)
{
    if (!(alpha_fs > 0.0)) {
        throw DomainError("kg_hydrogen_level: alpha must be positive");
    }
    if (n_r < 0) {
        throw DomainError("kg_hydrogen_level: n_r must be non-negative");
    }
    constexpr double w = 0.5;
    KgHydrogenLevel level;
    double e = m;
    for (level.iterations = 1; level.iterations <= 200; ++level.iterations) {
        const KgHydrogenMap map = kg_hydrogen_map(alpha_fs, l, e, m);
        double lambda = 0.0;
        if (tau.is_standard()) {
            lambda = 0.5 + n_r + map.p;
        } else {
            lambda = *solve_attractive_coulomb(map.effective, tau, n_r + 1).states.back().lambda;
        }
        // E^2 - m^2 = -m_eff a_eff^2 / (2 lambda^2) = -E^2 alpha^2 / lambda^2 with
        // m_eff = 1/2, a_eff = 2 E alpha; solved for E at fixed lambda.
        const double target = m / std::sqrt(1.0 + alpha_fs * alpha_fs / (lambda * lambda));
        const double next = (1.0 - w) * e + w * target;
        level.lambda = lambda;
        if (std::abs(next - e) < 1e-10 * m) {
            level.energy = next;
            level.converged = true;
            return level;
        }
        e = next;
    }
    level.energy = e;
    level.iterations = 200;
    return level;
}

double scarf_b(double s, double gamma_c, double eta)
{
    if (!(s > 0.0 && s < 0.5) || !(gamma_c > 0.0) || !(eta > 0.0)) {
        throw DomainError("scarf_b: requires 0 < s < 1/2, gamma > 0, eta > 0");
    }
    const double x = gamma_c / eta;
    return -std::pow(2.0 * eta, -2.0 * s) / reflection_ratio(s) * specfun::gamma_ratio(0.5 - s - x, 0.5 + s - x);
}

bool ground_state_window(double energy, const RadialProblem& problem)
{
    const SingularityAnalysis a = analyze(problem);
    if (!a.p || !(problem.coulomb < 0.0) || !(energy < 0.0)) {
        return false;
    }
    const double lambda = -problem.coulomb * std::sqrt(problem.m / (-2.0 * energy));
    const double x = 0.5 - *a.p - lambda;
    return -1.0 < x && x < 0.0;
}

SpectrumResult window_filtered(const SpectrumResult& result)
{
    SpectrumResult out = result;
    std::erase_if(out.states, [&](const BoundState& s) {
        return s.n_r == 0 && !ground_state_window(s.energy, result.problem);
    });
    return out;
}

} // namespace sae
