#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sae/errors.hpp"
#include "sae/oracle.hpp"
#include "sae/spectra.hpp"
#include "support/reference.hpp"

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>

using sae::RadialProblem;
using sae::SAEParameter;
namespace oracle = sae::oracle;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RadialProblem with_p(double p, double coulomb = -1.0, double m = 1.0, int l = 0)
{
    RadialProblem pr;
    pr.m = m;
    pr.l = l;
    pr.v0 = (l * (l + 1) + 0.25 - p * p) / (2.0 * m);
    pr.coulomb = coulomb;
    return pr;
}

SAEParameter tau_of(double t) { return SAEParameter::from_tau(t); }

// f = u / r^s in x = ln r:  f_xx + (2s - 1) f_x = (A e^x + B e^{2x}) f, with
// A = 2m coulomb and B = 2m(tail(0) - E), started at f = 1, f_x = 0 deep inside.
// The tolerance is purely relative: absolute errors in f_x near the origin seed
// the r^{1-2s} mode, which grows outward.
double reduced_solution(double s, double a, double b, double r_end)
{
    using State = std::array<double, 2>;
    State y{1.0, 0.0};
    const auto rhs = [&](const State& v, State& dv, double x) {
        dv[0] = v[1];
        dv[1] = (a * std::exp(x) + b * std::exp(2.0 * x)) * v[0] - (2.0 * s - 1.0) * v[1];
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled(1e-300, 1e-14, ode::runge_kutta_fehlberg78<State>()), rhs, y,
                            std::log(1e-150), std::log(r_end), 1e-2);
    return y[0];
}

// c1 and c2 from (f - 1) / r = c1 + c2 r + ... sampled at r = h, 2h, 3h, 4h and
// extrapolated to r = 0 with the interpolating cubic.
std::pair<double, double> fitted_coefficients(double s, double a, double b, double h)
{
    std::array<double, 4> x{};
    std::array<double, 4> g{};
    for (int i = 0; i < 4; ++i) {
        x[i] = (i + 1) * h;
        g[i] = (reduced_solution(s, a, b, x[i]) - 1.0) / x[i];
    }
    double value = 0.0;
    double slope = 0.0;
    for (int i = 0; i < 4; ++i) {
        double l0 = 1.0;
        double d0 = 0.0;
        for (int j = 0; j < 4; ++j) {
            if (j == i) {
                continue;
            }
            const double w = 1.0 / (x[i] - x[j]);
            d0 = d0 * (-x[j] * w) + l0 * w;
            l0 *= -x[j] * w;
        }
        value += g[i] * l0;
        slope += g[i] * d0;
    }
    return {value, slope};
}

} // namespace

TEST_CASE("Frobenius coefficients")
{
    for (double p : {0.1, 0.25, 0.4}) {
        for (double alpha : {1.0, 0.3}) {
            for (double e : {-0.7, -2.5}) {
                RadialProblem pr = with_p(p, -alpha, 1.3);
                for (int sign : {1, -1}) {
                    const auto fs = oracle::frobenius_coefficients(pr, e, sign);
                    const double s = 0.5 + sign * p;
                    CHECK(fs.exponent == doctest::Approx(s).epsilon(1e-15));
                    CHECK(fs.c1 == doctest::Approx(-2.0 * pr.m * alpha / (1.0 + 2.0 * sign * p)).epsilon(1e-14));

                    const auto [c1, c2] = fitted_coefficients(s, -2.0 * pr.m * alpha, -2.0 * pr.m * e, 1e-3);
                    CHECK(fs.c1 == doctest::Approx(c1).epsilon(1e-8));
                    CHECK(fs.c2 == doctest::Approx(c2).epsilon(1e-6));

                    // exact solution r^s e^{-kappa r} M(s - lambda, 2s, 2 kappa r)
                    const double kappa = std::sqrt(-2.0 * pr.m * e);
                    const double lambda = pr.m * alpha / kappa;
                    const auto exact = [&](double x) {
                        return std::exp(-kappa * x) * boost::math::hypergeometric_1F1(s - lambda, 2.0 * s, 2.0 * kappa * x);
                    };
                    const double h = 1e-3;
                    const double d1 = (exact(h) - exact(-h)) / (2.0 * h);
                    const double d2 = (exact(h) - 2.0 + exact(-h)) / (2.0 * h * h);
                    CHECK(fs.c1 == doctest::Approx(d1).epsilon(1e-5));
                    CHECK(fs.c2 == doctest::Approx(d2).epsilon(1e-5));
                }
            }
        }
    }
    // harmonic tail contributes only at r^2 through B
    RadialProblem pr = with_p(0.25, 0.0);
    pr.tail = sae::harmonic_tail(1.0);
    const auto fs = oracle::frobenius_coefficients(pr, 2.0, 1);
    CHECK(fs.c1 == 0.0);
    CHECK(fs.c2 == doctest::Approx(-2.0 * 2.0 / (2.0 * 2.5)).epsilon(1e-14));
}

TEST_CASE("matching defect at and away from eigenvalues")
{
    RadialProblem h;
    h.coulomb = -1.0;
    const auto g = oracle::integrate_radial(h, -0.5, SAEParameter::standard());
    CHECK(std::abs(g.matching_defect) < 1e-8);
    CHECK(g.node_count == 0);

    const RadialProblem pr = with_p(0.25);
    const auto at = oracle::integrate_radial(pr, -1.0 / (2.0 * 0.75 * 0.75), SAEParameter::standard());
    CHECK(std::abs(at.matching_defect) < 1e-6);
    const auto off = oracle::integrate_radial(pr, -0.5, SAEParameter::standard());
    CHECK(std::abs(off.matching_defect) > 1e-2);
    CHECK(off.matching_defect == off.matching_defect);
}

TEST_CASE("oracle reproduces the closed forms and the transcendental roots")
{
    int pairs = 0;
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {0.0, kInf, -1.0, 0.7}) {
            const SAEParameter tau = tau_of(t);
            const auto formula = sae::solve_attractive_coulomb(pr, tau, 3);
            const auto found = oracle::find_lowest_levels(pr, tau, 3);
            REQUIRE(found.states.size() == 3);
            for (int k = 0; k < 3; ++k) {
                CHECK(ref::rel(found.states[k].energy, formula.states[k].energy) < 1e-6);
                CHECK(found.states[k].node_count == k);
                CHECK(found.states[k].source == sae::Source::oracle);
            }
            ++pairs;
        }
    }
    CHECK(pairs >= 12);
}

TEST_CASE("pure inverse square")
{
    RadialProblem pr;
    pr.v0 = 3.0 / 32.0;
    const auto one = oracle::find_levels(pr, tau_of(-1.0), {-10.0, -1e-4}, 5);
    REQUIRE(one.states.size() == 1);
    CHECK(ref::rel(one.states[0].energy, ref::kInverseSquareLevel) < 1e-6);
    CHECK(one.states[0].node_count == 0);
    CHECK(oracle::find_levels(pr, SAEParameter::standard(), {-10.0, -1e-4}, 5).states.empty());
    CHECK(oracle::find_levels(pr, tau_of(kInf), {-10.0, -1e-4}, 5).states.empty());
    CHECK(oracle::find_levels(pr, tau_of(-kInf), {-10.0, -1e-4}, 5).states.empty());
}

TEST_CASE("mesh halving")
{
    oracle::MeshSpec fine;
    fine.points_per_decade = 4000;
    for (double p : {0.1, 0.4}) {
        for (double t : {-1.0, kInf}) {
            const auto a = oracle::find_lowest_levels(with_p(p), tau_of(t), 3);
            const auto b = oracle::find_lowest_levels(with_p(p), tau_of(t), 3, fine);
            for (int k = 0; k < 3; ++k) {
                CHECK(ref::rel(a.states[k].energy, b.states[k].energy) < 1e-8);
            }
        }
    }
}

TEST_CASE("boundary data are honored")
{
    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {-1.0, 0.7, -0.05, 20.0}) {
            const auto s = oracle::integrate_radial(pr, -0.8, tau_of(t));
            CHECK(ref::rel(s.tau_fit(), t) < 1e-6);
        }
        const auto z = oracle::integrate_radial(pr, -0.8, SAEParameter::standard());
        CHECK(std::abs(z.tau_fit()) < 1e-8);
        const auto inf = oracle::integrate_radial(pr, -0.8, tau_of(kInf));
        CHECK(std::abs(inf.a_st) < 1e-8 * std::abs(inf.a_add));

        // u -> 0 at the origin with the additional exponent as the worst case
        const auto e = oracle::eigenfunction(pr, tau_of(kInf), sae::closed_levels(pr, sae::Branch::additional, 0).states[0].energy);
        const std::size_t n = static_cast<std::size_t>(e.points_per_decade);
        const double slope = std::log(std::abs(e.u[n] / e.u[0])) / std::log(e.r[n] / e.r[0]);
        CHECK(slope >= 0.5 - p - 0.01);
        CHECK(std::abs(e.u[0]) < std::abs(e.u[n]));
    }
}

TEST_CASE("virial theorem")
{
    RadialProblem h;
    h.coulomb = -1.0;
    const auto g = oracle::eigenfunction(h, SAEParameter::standard(), -0.5);
    CHECK(std::abs(oracle::virial_residual(g, h)) < 1e-6);

    const RadialProblem pr = with_p(0.25);
    const auto st = oracle::eigenfunction(pr, SAEParameter::standard(), -1.0 / (2.0 * 0.75 * 0.75));
    const auto vs = oracle::virial(st, pr);
    CHECK(std::abs(vs.generalized) < 1e-4);
    CHECK(std::abs(vs.boundary_term) < 1e-10);

    const auto ad = oracle::eigenfunction(pr, tau_of(kInf), -8.0);
    CHECK(std::abs(oracle::virial_residual(ad, pr)) < 1e-4 * 8.0);

    for (double t : {-1.0, 0.7}) {
        const auto lv = oracle::find_lowest_levels(pr, tau_of(t), 2);
        for (const auto& s : lv.states) {
            const auto v = oracle::virial(oracle::eigenfunction(pr, tau_of(t), s.energy), pr);
            CHECK(std::abs(v.generalized) < 1e-4 * std::abs(s.energy));
            CHECK(std::abs(v.naive) > 10.0 * std::abs(v.generalized));
        }
    }

    RadialProblem inv;
    inv.v0 = 3.0 / 32.0;
    const auto one = oracle::eigenfunction(inv, tau_of(-1.0), ref::kInverseSquareLevel);
    const auto vi = oracle::virial(one, inv);
    CHECK(std::abs(vi.generalized) < 1e-4);
    CHECK(std::abs(vi.naive) >= 10.0 * std::abs(vi.generalized));

    RadialProblem osc = with_p(0.25, 0.0);
    osc.tail = sae::harmonic_tail(1.0);
    const auto lv = oracle::find_lowest_levels(osc, tau_of(-1.0), 2);
    for (const auto& s : lv.states) {
        CHECK(std::abs(oracle::virial_residual(oracle::eigenfunction(osc, tau_of(-1.0), s.energy), osc)) < 1e-4);
    }
}

TEST_CASE("orthogonality")
{
    RadialProblem h;
    h.coulomb = -1.0;
    const auto h1 = oracle::eigenfunction(h, SAEParameter::standard(), -0.5);
    const auto h2 = oracle::eigenfunction(h, SAEParameter::standard(), -0.125);
    CHECK(std::abs(oracle::overlap(h1, h2)) < 1e-8);
    CHECK(std::abs(oracle::orthogonality_defect(h1, h2)) < 1e-8);

    for (double p : {0.1, 0.25, 0.4}) {
        const RadialProblem pr = with_p(p);
        for (double t : {-1.0, 0.7, kInf}) {
            const auto lv = oracle::find_lowest_levels(pr, tau_of(t), 2);
            const auto s1 = oracle::eigenfunction(pr, tau_of(t), lv.states[0].energy);
            const auto s2 = oracle::eigenfunction(pr, tau_of(t), lv.states[1].energy);
            const double scale =
                p * (std::abs(s1.a_st) + std::abs(s1.a_add)) * (std::abs(s2.a_st) + std::abs(s2.a_add));
            CHECK(std::abs(oracle::orthogonality_defect(s1, s2)) < 1e-8 * scale);
            CHECK(std::abs(oracle::overlap(s1, s2)) < 1e-8);
        }
        const auto st = sae::closed_levels(pr, sae::Branch::standard, 0).states[0].energy;
        const auto ad = sae::closed_levels(pr, sae::Branch::additional, 0).states[0].energy;
        const auto s1 = oracle::eigenfunction(pr, SAEParameter::standard(), st);
        const auto s2 = oracle::eigenfunction(pr, tau_of(kInf), ad);
        const double lhs = pr.m * (s2.energy - s1.energy) * oracle::overlap(s1, s2);
        const double rhs = oracle::orthogonality_defect(s1, s2);
        CHECK(std::abs(rhs) > 1e-3);
        CHECK(ref::rel(lhs, rhs) < 1e-4);
    }

    // log case
    RadialProblem lc;
    lc.v0 = 0.125;
    lc.coulomb = -1.0;
    const auto a = oracle::find_lowest_levels(lc, tau_of(-0.5), 2);
    REQUIRE(a.states.size() == 2);
    const auto l1 = oracle::eigenfunction(lc, tau_of(-0.5), a.states[0].energy);
    const auto l2 = oracle::eigenfunction(lc, tau_of(-0.5), a.states[1].energy);
    CHECK(std::abs(oracle::overlap(l1, l2)) < 1e-8);
    const auto b = oracle::find_lowest_levels(lc, tau_of(0.5), 1);
    const auto l3 = oracle::eigenfunction(lc, tau_of(0.5), b.states[0].energy);
    const double lhs = lc.m * (l3.energy - l1.energy) * oracle::overlap(l1, l3);
    CHECK(ref::rel(lhs, oracle::orthogonality_defect(l1, l3)) < 1e-4);
}

TEST_CASE("bracket classes")
{
    CHECK(oracle::boundary_bracket_class({-1.0, -1.0}, oracle::EquationKind::schrodinger).kind ==
          oracle::BracketClass::identically_zero);
    CHECK(oracle::boundary_bracket_class({0.2, 0.2}, oracle::EquationKind::klein_gordon).kind ==
          oracle::BracketClass::identically_zero);
    CHECK(oracle::boundary_bracket_class({-0.3, -0.3}, oracle::EquationKind::dirac).kind ==
          oracle::BracketClass::nonzero);
    CHECK(oracle::to_string(oracle::BracketClass::nonzero) == "nonzero");
}

TEST_CASE("zero-energy nodes")
{
    RadialProblem pr;
    pr.v0 = 3.0 / 32.0;
    const auto one = oracle::e0_nodes(pr, tau_of(-1.0));
    REQUIRE(one.count == 1);
    CHECK(one.radii[0] == doctest::Approx(sae::e0_node_radius(1.0, -1.0, 0.25)).epsilon(1e-6));
    const auto other = oracle::e0_nodes(pr, tau_of(-0.3));
    REQUIRE(other.count == 1);
    CHECK(other.radii[0] == doctest::Approx(sae::e0_node_radius(1.0, -0.3, 0.25)).epsilon(1e-6));
    CHECK(oracle::e0_node_count(pr, SAEParameter::standard()) == 0);
    CHECK(oracle::e0_node_count(pr, tau_of(kInf)) == 0);
    CHECK(oracle::e0_node_count(pr, tau_of(0.5)) == 0);
    for (double t : {-1.0, -0.3, 0.0, kInf}) {
        const auto lv = oracle::find_levels(pr, tau_of(t), {-1e3, -1e-6}, 5);
        CHECK(static_cast<int>(lv.states.size()) == oracle::e0_node_count(pr, tau_of(t)));
    }
}

TEST_CASE("singular oscillator spacing")
{
    const double p = 0.25;
    RadialProblem pr = with_p(p, 0.0);
    pr.tail = sae::harmonic_tail(1.0); // g r^2, omega = sqrt(2 g / m)
    const double omega = std::sqrt(2.0);

    const auto st = oracle::spacing_report(pr, SAEParameter::standard(), 4);
    CHECK(st.equidistant);
    CHECK(st.max_relative_deviation < 1e-4);
    for (int k = 0; k < 4; ++k) {
        CHECK(ref::rel(st.energies[k], omega * (2 * k + 1 + p)) < 1e-8);
    }
    const auto ad = oracle::spacing_report(pr, tau_of(kInf), 4);
    CHECK(ad.equidistant);
    for (int k = 0; k < 4; ++k) {
        CHECK(ref::rel(ad.energies[k], omega * (2 * k + 1 - p)) < 1e-8);
    }
    for (double t : {-1.0, 0.5}) {
        const auto mixed = oracle::spacing_report(pr, tau_of(t), 4);
        CHECK_FALSE(mixed.equidistant);
        CHECK(mixed.max_relative_deviation > 1e-2);
        // gaps shrink towards 2 omega from one side only
        for (std::size_t k = 0; k + 1 < mixed.gaps.size(); ++k) {
            CHECK(std::abs(mixed.gaps[k + 1] - 2.0 * omega) < std::abs(mixed.gaps[k] - 2.0 * omega));
        }
    }
}

TEST_CASE("sinh^-2 potential")
{
    const double p = 0.25;
    RadialProblem pr = with_p(p, 0.0);
    pr.tail = sae::sinh_squared_tail(1.0, pr.v0);
    const auto lv = oracle::find_lowest_levels(pr, tau_of(-1.0), 1);
    REQUIRE(lv.states.size() == 1);
    CHECK(lv.states[0].energy < 0.0);
    CHECK(lv.states[0].node_count == 0);
    CHECK(oracle::find_levels(pr, SAEParameter::standard(), {-50.0, -1e-6}, 3).states.empty());
}

TEST_CASE("higher partial wave")
{
    const RadialProblem pr = with_p(0.3, -1.0, 1.0, 1);
    for (double t : {-1.0, 0.0}) {
        const auto formula = sae::solve_attractive_coulomb(pr, tau_of(t), 2);
        const auto found = oracle::find_lowest_levels(pr, tau_of(t), 2);
        for (int k = 0; k < 2; ++k) {
            CHECK(ref::rel(found.states[k].energy, formula.states[k].energy) < 1e-6);
            CHECK(found.states[k].node_count == k);
        }
    }
}

TEST_CASE("argument checks")
{
    const RadialProblem pr = with_p(0.25);
    CHECK_THROWS_AS(oracle::find_levels(pr, tau_of(-1.0), {-1.0, -2.0}, 3), sae::DomainError);
    RadialProblem fall;
    fall.v0 = 1.0;
    CHECK_THROWS_AS(oracle::integrate_radial(fall, -1.0, SAEParameter::standard()), sae::RegimeError);
    const auto few = oracle::find_levels(pr, tau_of(-1.0), {-0.2, -0.1}, 5);
    CHECK_FALSE(few.diagnostics.empty());
}
