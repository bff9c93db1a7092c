// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include "sae/oracle.hpp"
#include "sae/singular.hpp"
#include "sae/specfun.hpp"
#include "sae/spectra.hpp"
#include "support/reference.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

using sae::RadialProblem;
using sae::SAEParameter;
namespace oracle = sae::oracle;
namespace sf = sae::specfun;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
int failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail)
{
    std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

RadialProblem with_p(double p, double coulomb = -1.0, double m = 1.0)
{
    RadialProblem pr;
    pr.m = m;
    pr.v0 = (0.25 - p * p) / (2.0 * m);
    pr.coulomb = coulomb;
    return pr;
}

SAEParameter tau_of(double t) { return SAEParameter::from_tau(t); }

void hydrogen()
{
    RadialProblem h;
    h.coulomb = -1.0;
    double worst = 0.0;
    const auto r = sae::closed_levels(h, sae::Branch::standard, 4);
    for (int n = 1; n <= 5; ++n) {
        worst = std::max(worst, ref::rel(r.states[n - 1].energy, -1.0 / (2.0 * n * n)));
    }
    report(1, "hydrogen reduction", worst < 1e-12, fmt("max rel dev %.2e over n <= 5", worst));
}

void closed_vs_oracle()
{
    double worst = 0.0;
    bool nodes = true;
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {0.0, kInf, -kInf}) {
            const auto branch = t == 0.0 ? sae::Branch::standard : sae::Branch::additional;
            const auto closed = sae::closed_levels(pr, branch, 2);
            const auto found = oracle::find_lowest_levels(pr, tau_of(t), 3);
            for (int k = 0; k < 3; ++k) {
                worst = std::max(worst, ref::rel(found.states.at(k).energy, closed.states[k].energy));
                nodes = nodes && found.states[k].node_count == k;
            }
        }
    }
    report(2, "closed form vs oracle", worst < 1e-6 && nodes, fmt("max rel dev %.2e, 18 levels", worst));
}

void inverse_square()
{
    RadialProblem pr;
    pr.v0 = 3.0 / 32.0;
    const double e = sae::inverse_square_level(pr, tau_of(-1.0))->energy;
    const double g = boost::math::tgamma(1.25) / boost::math::tgamma(0.75);
    const double formula_dev = ref::rel(e, -2.0 * std::pow(g, 4.0));
    const auto one = oracle::find_levels(pr, tau_of(-1.0), {-10.0, -1e-4}, 5);
    const bool single = one.states.size() == 1;
    const double dev = single ? ref::rel(one.states[0].energy, e) : 1.0;
    std::size_t others = 0;
    for (double t : {0.0, kInf, -kInf}) {
        others += oracle::find_levels(pr, tau_of(t), {-10.0, -1e-4}, 5).states.size();
    }
    report(3, "inverse-square single level", formula_dev < 1e-12 && single && dev < 1e-6 && others == 0,
           fmt("E = %.12f, oracle rel dev %.2e, levels at tau in {0, +-inf}: %.0f", e, dev,
               static_cast<double>(others)));
}

double boost_g(double p, double lambda, double tau, double m, double alpha)
{
    using boost::math::tgamma;
    return tgamma(0.5 - lambda - p) / tgamma(0.5 - lambda + p) +
           tau * tgamma(1.0 - 2.0 * p) / tgamma(1.0 + 2.0 * p) * std::pow(2.0 * m * alpha, 2.0 * p) *
               std::pow(lambda, -2.0 * p);
}

// Sign changes of boost_g strictly inside (lo, hi), on a grid that clusters
// geometrically towards both ends.
int sign_changes(double p, double tau, double lo, double hi)
{
    std::vector<double> t;
    const double deepest = lo == 0.0 ? 1e-40 : 1e-13;
    for (double d = deepest; d < 0.5; d *= 1.02) {
        t.push_back(d);
    }
    for (double d = 1e-13; d < 0.5; d *= 1.02) {
        t.push_back(1.0 - d);
    }
    for (int i = 1; i < 2000; ++i) {
        t.push_back(i / 2000.0);
    }
    std::sort(t.begin(), t.end());
    int changes = 0;
    double prev = boost_g(p, lo + (hi - lo) * t.front(), tau, 1.0, 1.0);
    for (double f : t) {
        const double v = boost_g(p, lo + (hi - lo) * f, tau, 1.0, 1.0);
        if ((v < 0.0) != (prev < 0.0)) {
            ++changes;
        }
        prev = v;
    }
    return changes;
}

void interlacing()
{
    bool inside = true;
    bool unique = true;
    for (int i = 0; i < 50; ++i) {
        const double p = ref::uniform(0.02, 0.48);
        const double tau = -std::exp(ref::uniform(-3.0, 3.0));
        const auto r = sae::solve_attractive_coulomb(with_p(p), tau_of(tau), 4);
        for (int k = 0; k < 4; ++k) {
            const double lo = k == 0 ? 0.0 : 0.5 - p + (k - 1);
            const double hi = 0.5 - p + k;
            const double lambda = *r.states[k].lambda;
            inside = inside && lambda > lo && lambda < hi;
            unique = unique && sign_changes(p, tau, lo, hi) == 1;
        }
    }

    // limits, extrapolated linearly to theta = 0 and pi/2 from offsets 1e-4 and 1e-6
    double worst = 0.0;
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double sign : {1.0, -1.0}) {
            const auto limit = [&](double theta0, int k) {
                const auto at = [&](double d) {
                    return *sae::solve_attractive_coulomb(pr, SAEParameter::from_theta(theta0 + sign * d), 3)
                                .states[k]
                                .lambda;
                };
                return (at(1e-6) * 1e-4 - at(1e-4) * 1e-6) / (1e-4 - 1e-6);
            };
            const int shift = sign < 0.0 ? 1 : 0;
            for (int k = 0; k + shift < 3; ++k) {
                worst = std::max(worst, ref::rel(limit(0.0, k + shift), 0.5 + p + k));
            }
            for (int k = 0; k < 3; ++k) {
                worst = std::max(worst, ref::rel(limit(std::numbers::pi / 2, k), 0.5 - p + k));
            }
        }
    }
    report(4, "root interlacing and continuation", inside && unique && worst < 1e-6,
           fmt("50 draws x 4 brackets: inside %.0f, one sign change %.0f; limit rel dev %.2e", inside, unique, worst));
}

void fall_tower()
{
    double worst = 0.0;
    bool unbounded = true;
    for (double s : {0.5, 1.0, 2.0}) {
        RadialProblem pr;
        pr.m = 0.5;
        pr.v0 = s * s + 0.25;
        const auto r = sae::fall_spectrum(pr, 0.0, -5, 5);
        const double expected = std::exp(-2.0 * std::numbers::pi / s);
        for (std::size_t i = 0; i + 1 < r.states.size(); ++i) {
            worst = std::max(worst, ref::rel(r.states[i + 1].energy / r.states[i].energy, expected));
        }
        double last = 0.0;
        for (int n = 0; n >= -40; n -= 10) {
            const double e = sae::fall_spectrum(pr, 0.0, n, n).states[0].energy;
            unbounded = unbounded && e < last;
            last = e;
        }
        unbounded = unbounded && last < -1e20;
    }
    report(5, "fall tower ratio", worst < 1e-12 && unbounded, fmt("max rel dev of ratio %.2e", worst));
}

void virial()
{
    double mixed = 0.0;
    double pure = 0.0;
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {-1.0, 0.7}) {
            for (const auto& s : oracle::find_lowest_levels(pr, tau_of(t), 2).states) {
                const auto v = oracle::virial(oracle::eigenfunction(pr, tau_of(t), s.energy), pr);
                mixed = std::max(mixed, std::abs(v.generalized));
            }
        }
        for (double t : {0.0, kInf}) {
            for (const auto& s : oracle::find_lowest_levels(pr, tau_of(t), 2).states) {
                const auto v = oracle::virial(oracle::eigenfunction(pr, tau_of(t), s.energy), pr);
                pure = std::max(pure, std::abs(v.naive));
            }
        }
    }
    RadialProblem inv;
    inv.v0 = 3.0 / 32.0;
    const auto v = oracle::virial(oracle::eigenfunction(inv, tau_of(-1.0), ref::kInverseSquareLevel), inv);
    mixed = std::max(mixed, std::abs(v.generalized));
    report(6, "virial theorem", mixed < 1e-4 && pure < 1e-4,
           fmt("max generalized residual (mixed tau) %.2e, max plain residual (pure branch) %.2e", mixed, pure));
}

void orthogonality()
{
    double same = 0.0;
    double cross = 0.0;
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {-1.0, 0.7, 0.0, kInf}) {
            const auto lv = oracle::find_lowest_levels(pr, tau_of(t), 3);
            for (int i = 0; i < 3; ++i) {
                for (int j = i + 1; j < 3; ++j) {
                    const auto s1 = oracle::eigenfunction(pr, tau_of(t), lv.states[i].energy);
                    const auto s2 = oracle::eigenfunction(pr, tau_of(t), lv.states[j].energy);
                    const double scale =
                        p * (std::abs(s1.a_st) + std::abs(s1.a_add)) * (std::abs(s2.a_st) + std::abs(s2.a_add));
                    same = std::max(same, std::abs(oracle::orthogonality_defect(s1, s2)) / scale);
                }
            }
        }
        const std::pair<double, double> taus[] = {{0.0, kInf}, {-1.0, 0.7}, {0.0, -1.0}};
        for (const auto& [t1, t2] : taus) {
            const auto e1 = oracle::find_lowest_levels(pr, tau_of(t1), 2);
            const auto e2 = oracle::find_lowest_levels(pr, tau_of(t2), 2);
            for (int i = 0; i < 2; ++i) {
                const auto s1 = oracle::eigenfunction(pr, tau_of(t1), e1.states[i].energy);
                const auto s2 = oracle::eigenfunction(pr, tau_of(t2), e2.states[1 - i].energy);
                const double lhs = pr.m * (s2.energy - s1.energy) * oracle::overlap(s1, s2);
                cross = std::max(cross, ref::rel(lhs, oracle::orthogonality_defect(s1, s2)));
            }
        }
    }
    report(7, "orthogonality", same < 1e-8 && cross < 1e-4,
           fmt("max scaled same-tau defect %.2e, max cross-tau rel mismatch %.2e", same, cross));
}

void node_theorems()
{
    bool ok = true;
    int spectra = 0;
    const auto check = [&](const RadialProblem& pr, const SAEParameter& tau, int count) {
        const auto lv = oracle::find_lowest_levels(pr, tau, count);
        for (std::size_t k = 0; k < lv.states.size(); ++k) {
            ok = ok && lv.states[k].node_count == static_cast<int>(k);
        }
        ok = ok && static_cast<int>(lv.states.size()) == count;
        ++spectra;
    };
    for (double p : {0.1, 0.25, 0.4}) {
        for (double t : {0.0, kInf, -1.0, 0.7, -0.01, 30.0}) {
            check(with_p(p), tau_of(t), 4);
        }
    }
    RadialProblem osc = with_p(0.25, 0.0);
    osc.tail = sae::harmonic_tail(1.0);
    check(osc, tau_of(-1.0), 4);
    RadialProblem lc;
    lc.v0 = 0.125;
    lc.coulomb = -1.0;
    check(lc, tau_of(-0.5), 3);

    RadialProblem inv;
    inv.v0 = 3.0 / 32.0;
    bool e0 = true;
    for (double t : {-1.0, -0.3, -5.0, 0.0, kInf, -kInf}) {
        const int nodes = oracle::e0_node_count(inv, tau_of(t));
        const auto lv = oracle::find_levels(inv, tau_of(t), {-1e4, -1e-8}, 5);
        const int expected = t < 0.0 && std::isfinite(t) ? 1 : 0;
        e0 = e0 && nodes == expected && static_cast<int>(lv.states.size()) == expected;
    }
    report(8, "node theorems", ok && e0,
           fmt("%.0f spectra with node_count = k: %.0f; E = 0 nodes equal level count: %.0f", spectra, ok, e0));
}

void repulsive_background()
{
    RadialProblem pr = with_p(0.25, 1.0);
    std::size_t empty = 0;
    for (double t : {0.0, kInf, -kInf}) {
        empty += sae::solve_repulsive_coulomb(pr, tau_of(t), 3).states.size();
        empty += oracle::find_levels(pr, tau_of(t), {-100.0, -1e-8}, 3).states.size();
    }
    RadialProblem inv = with_p(0.25, 0.0);
    for (double t : {0.0, kInf}) {
        empty += oracle::find_levels(inv, tau_of(t), {-100.0, -1e-8}, 3).states.size();
    }
    const auto th = sae::repulsive_threshold(pr);
    const double tau = 0.5 * th.tau_lower;
    const auto formula = sae::solve_repulsive_coulomb(pr, tau_of(tau), 3);
    double dev = 1.0;
    if (!formula.states.empty()) {
        const double e = formula.states[0].energy;
        const auto found = oracle::find_levels(pr, tau_of(tau), {4.0 * e, 0.25 * e}, 3);
        if (found.states.size() == 1) {
            dev = ref::rel(found.states[0].energy, e);
        }
    }
    report(9, "no levels at tau in {0, inf}, one at an admissible tau", empty == 0 && th.at_least_one_level(tau_of(tau)) &&
                                                                         dev < 1e-6,
           fmt("levels at tau in {0, +-inf}: %.0f; admissible tau %.6f, oracle rel dev %.2e",
               static_cast<double>(empty), tau, dev));
}

void equidistance()
{
    RadialProblem osc = with_p(0.25, 0.0);
    osc.tail = sae::harmonic_tail(1.0);
    const auto st = oracle::spacing_report(osc, SAEParameter::standard(), 5);
    const auto ad = oracle::spacing_report(osc, tau_of(kInf), 5);
    const auto mx = oracle::spacing_report(osc, tau_of(-1.0), 5);
    report(10, "singular oscillator equidistance",
           st.max_relative_deviation < 1e-4 && ad.max_relative_deviation < 1e-4 && mx.max_relative_deviation > 1e-2,
           fmt("gap deviation tau=0 %.2e, tau=inf %.2e, tau=-1 %.2e", st.max_relative_deviation,
               ad.max_relative_deviation, mx.max_relative_deviation));
}

void special_functions()
{
    const double pi = std::numbers::pi;
    double gam = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = ref::uniform(-20.0, 20.0);
        if (std::abs(x - std::round(x)) < 1e-3) {
            continue;
        }
        gam = std::max(gam, ref::rel(sf::gamma(x) * sf::gamma(1.0 - x), pi / std::sin(pi * x)));
        gam = std::max(gam, ref::rel(sf::gamma(x + 1.0), x * sf::gamma(x)));
    }
    double ident = 0.0;
    for (double p : {0.1, 0.25, 0.4}) {
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.1 * i;
            const double k = sf::bessel_k(p, x);
            const double via_i = pi / (2.0 * std::sin(pi * p)) * (sf::bessel_i(-p, x) - sf::bessel_i(p, x));
            ident = std::max(ident, std::abs(via_i - k) / std::max(1.0, k));
        }
    }
    double half = 0.0;
    for (double x : {0.05, 0.5, 2.0, 10.0, 40.0}) {
        half = std::max(half, ref::rel(sf::bessel_i(0.5, x), std::sqrt(2.0 / (pi * x)) * std::sinh(x)));
        half = std::max(half, ref::rel(sf::bessel_i(-0.5, x), std::sqrt(2.0 / (pi * x)) * std::cosh(x)));
        half = std::max(half, ref::rel(sf::bessel_k(0.5, x), std::sqrt(pi / (2.0 * x)) * std::exp(-x)));
    }
    const double w = sf::whittaker_w(0.0, 0.25, 40.0) / std::exp(-20.0);
    const double kr = sf::bessel_k(0.25, 20.0) / (std::sqrt(pi / 40.0) * std::exp(-20.0));
    const double asym = std::max(std::abs(w - 1.0), std::abs(kr - 1.0));
    report(11, "special functions", gam < 1e-10 && ident < 1e-9 && half < 1e-10 && asym < 0.05,
           fmt("gamma %.2e, K identity %.2e, half-order %.2e", gam, ident, half) +
               fmt(", asymptotic ratios W %.4f K %.4f", w, kr));
}

} // namespace

int main()
{
    hydrogen();
    closed_vs_oracle();
    inverse_square();
    interlacing();
    fall_tower();
    virial();
    orthogonality();
    node_theorems();
    repulsive_background();
    equidistance();
    special_functions();
    return failures;
}
