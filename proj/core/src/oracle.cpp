#include "sae/oracle.hpp"

#include "sae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace sae::oracle {

namespace {

constexpr double kRescale = 1e150;
constexpr double kSmallestRMin = 1e-250;

struct Setup {
    RadialProblem problem;
    double p = 0.0;
    double p2 = 0.0; // P^2 entering g; exactly 0 in the log case
    bool log_case = false;
    SAEParameter tau;
};

Setup prepare(const RadialProblem& problem, const SAEParameter& tau)
{
    validate(problem);
    const SingularityAnalysis a = analyze(problem);
    if (a.regime == Regime::fall_to_center) {
        throw RegimeError("oracle integration is not available in the FALL_TO_CENTER regime");
    }
    if (a.regime == Regime::standard_only && !tau.is_standard()) {
        throw RegimeError("only tau = 0 is admissible for P >= 1/2");
    }
    Setup s;
    s.problem = problem;
    s.log_case = a.regime == Regime::log_case;
    s.p = s.log_case ? 0.0 : *a.p;
    s.p2 = s.log_case ? 0.0 : a.p_squared;
    s.tau = tau;
    return s;
}

double regular_potential(const RadialProblem& pr, double r)
{
    double v = pr.coulomb / r;
    if (pr.tail) {
        v += pr.tail->potential(r);
    }
    return v;
}

// u'' = q u with q = (P^2 - 1/4)/r^2 + 2m (V_reg - E)
double q_eff(const Setup& s, double r, double energy)
{
    return (s.p2 - 0.25) / (r * r) + 2.0 * s.problem.m * (regular_potential(s.problem, r) - energy);
}

double natural_length(const Setup& s, double energy)
{
    double length = 1.0;
    if (energy != 0.0) {
        length = std::min(length, 1.0 / std::sqrt(2.0 * s.problem.m * std::abs(energy)));
    }
    if (s.problem.coulomb != 0.0) {
        length = std::min(length, 1.0 / (2.0 * s.problem.m * std::abs(s.problem.coulomb)));
    }
    return length;
}

// Radius where the two boundary branches have equal weight.
double crossover_radius(const Setup& s)
{
    if (!s.tau.is_finite() || s.tau.is_standard()) {
        return std::numeric_limits<double>::infinity();
    }
    const double t = std::abs(s.tau.tau());
    if (s.log_case) {
        return std::exp(-1.0 / t);
    }
    return std::pow(t, 1.0 / (2.0 * s.p));
}

// The series start is accurate inside the natural length. Starting much
// deeper only lets rounding feed the growing branch over more decades. A
// tail enters the series through its origin value only, so start deeper then.
double auto_r_min(const Setup& s, double energy)
{
    const double factor = s.problem.tail ? 1e-3 : 1e-1;
    return std::max(factor * natural_length(s, energy), kSmallestRMin);
}

// Walk outward past the last classically allowed point, then until the WKB
// decay action int sqrt(q) dr reaches `action`.
double auto_r_max(const Setup& s, double energy, double r_min, double action)
{
    const double coarse = std::pow(10.0, 1.0 / 20.0);
    const double r_end = std::min(r_min * 1e30, 1e300);
    double last_allowed = r_min;
    for (double r = r_min; r < r_end; r *= coarse) {
        if (q_eff(s, r, energy) <= 0.0) {
            last_allowed = r;
        }
    }
    if (q_eff(s, r_end, energy) <= 0.0) {
        throw DomainError("energy " + std::to_string(energy) + " is not below the continuum: no decaying region");
    }
    const double fine = std::pow(10.0, 1.0 / 400.0);
    double accumulated = 0.0;
    double r = last_allowed;
    while (accumulated < action) {
        const double next = r * fine;
        const double q = q_eff(s, std::sqrt(r * next), energy);
        accumulated += std::sqrt(std::max(q, 0.0)) * (next - r);
        r = next;
        if (r > 1e300) {
            throw DomainError("decaying region too weak to bound the solution");
        }
    }
    return r;
}

struct Mesh {
    long k_lo = 0;
    int ppd = 0;
    double h = 0.0;
    std::vector<double> r;
    std::vector<double> base; // P^2 + 2m r^2 V_reg
    std::vector<double> r2m;  // 2m r^2

    [[nodiscard]] std::size_t size() const { return r.size(); }
};

double lattice_radius(long k, int ppd) { return std::exp(static_cast<double>(k) * std::numbers::ln10 / ppd); }

Mesh make_mesh(const Setup& s, double r_min, double r_max, int ppd)
{
    if (ppd < 10) {
        throw DomainError("points_per_decade must be at least 10");
    }
    if (!(r_min > 0.0) || !(r_max > r_min)) {
        throw DomainError("mesh requires 0 < r_min < r_max");
    }
    Mesh mesh;
    mesh.ppd = ppd;
    mesh.h = std::numbers::ln10 / ppd;
    mesh.k_lo = static_cast<long>(std::floor(std::log10(r_min) * ppd));
    const long k_hi = static_cast<long>(std::ceil(std::log10(r_max) * ppd));
    const std::size_t n = static_cast<std::size_t>(std::max(k_hi - mesh.k_lo + 1, 8L));
    mesh.r.resize(n);
    mesh.base.resize(n);
    mesh.r2m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = lattice_radius(mesh.k_lo + static_cast<long>(i), ppd);
        mesh.r[i] = r;
        mesh.r2m[i] = 2.0 * s.problem.m * r * r;
        mesh.base[i] = s.p2 + mesh.r2m[i] * regular_potential(s.problem, r);
    }
    return mesh;
}

std::vector<double> g_values(const Mesh& mesh, double energy)
{
    std::vector<double> g(mesh.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = mesh.base[i] - energy * mesh.r2m[i];
    }
    return g;
}

// Frobenius series r^s sum c_k r^k of u with
//   k (k + 2s - 1) c_k = A c_{k-1} + B c_{k-2},  A = 2m coulomb, B = 2m (t0 - E).
// Returns sum c_k r^k; in the log case also the series of the logarithmic
// solution u1 ln r + sqrt(r) sum d_k r^k with k^2 d_k = A d_{k-1} + B d_{k-2} - 2k c_k.
struct SeriesValue {
    double regular = 0.0;
    double log_part = 0.0;
};

SeriesValue frobenius_series(const Setup& s, double energy, double exponent, double r)
{
    const double m = s.problem.m;
    const double t0 = s.problem.tail ? s.problem.tail->origin_value : 0.0;
    const double a = 2.0 * m * s.problem.coulomb;
    const double b = 2.0 * m * (t0 - energy);
    double c_prev2 = 0.0;
    double c_prev = 1.0;
    double d_prev2 = 0.0;
    double d_prev = 0.0;
    double power = 1.0;
    SeriesValue v{1.0, 0.0};
    bool previous_small = false;
    for (int k = 1; k <= 80; ++k) {
        const double kk = k;
        const double c = (a * c_prev + b * c_prev2) / (kk * (kk + 2.0 * exponent - 1.0));
        double d = 0.0;
        if (s.log_case) {
            d = (a * d_prev + b * d_prev2 - 2.0 * kk * c) / (kk * kk);
        }
        power *= r;
        v.regular += c * power;
        v.log_part += d * power;
        // two small terms in a row: odd terms vanish without a Coulomb part
        const bool small = std::abs(c * power) < 1e-18 * std::abs(v.regular) &&
                           std::abs(d * power) <= 1e-18 * std::max(std::abs(v.log_part), 1.0);
        if (small && previous_small) {
            break;
        }
        previous_small = small;
        c_prev2 = c_prev;
        c_prev = c;
        d_prev2 = d_prev;
        d_prev = d;
    }
    return v;
}

// Boundary branches in w = u / sqrt(r): (standard, additional).
std::pair<double, double> basis(const Setup& s, double energy, double r)
{
    const double lr = std::log(r);
    if (s.log_case) {
        const SeriesValue v = frobenius_series(s, energy, 0.5, r);
        return {v.regular, lr * v.regular + v.log_part};
    }
    const double standard = std::exp(s.p * lr) * frobenius_series(s, energy, 0.5 + s.p, r).regular;
    double additional = 0.0;
    if (s.p < 0.5) {
        additional = std::exp(-s.p * lr) * frobenius_series(s, energy, 0.5 - s.p, r).regular;
    }
    return {standard, additional};
}

double start_value(const Setup& s, double energy, double r)
{
    const auto [ws, wa] = s.tau.weights();
    const auto [bs, ba] = basis(s, energy, r);
    return ws * bs + (wa == 0.0 ? 0.0 : wa * ba);
}

// Extended precision: f is 1 - O(h^2), so doubles would drop half the digits
// of the h^2 g part that distinguishes the branches.
using Real = long double;

Real numerov_f(double h, double g)
{
    const Real hh = static_cast<Real>(h);
    return 1.0L - hh * hh * static_cast<Real>(g) / 12.0L;
}

// Sign-change counter that ignores exact zeros.
class NodeCounter {
public:
    bool push(double w)
    {
        if (w == 0.0) {
            return false;
        }
        const int s = w > 0.0 ? 1 : -1;
        const bool changed = last_ != 0 && s != last_;
        if (changed) {
            ++count_;
        }
        last_ = s;
        return changed;
    }
    [[nodiscard]] int count() const { return count_; }

private:
    int last_ = 0;
    int count_ = 0;
};

int count_outward(const Setup& s, const Mesh& mesh, double energy)
{
    const std::vector<double> g = g_values(mesh, energy);
    const double h = mesh.h;
    Real w0 = start_value(s, energy, mesh.r[0]);
    Real w1 = start_value(s, energy, mesh.r[1]);
    NodeCounter nodes;
    nodes.push(static_cast<double>(w0));
    nodes.push(static_cast<double>(w1));
    Real f0 = numerov_f(h, g[0]);
    Real f1 = numerov_f(h, g[1]);
    for (std::size_t i = 2; i < g.size(); ++i) {
        const Real f2 = numerov_f(h, g[i]);
        const Real w2 = ((12.0L - 10.0L * f1) * w1 - f0 * w0) / f2;
        nodes.push(static_cast<double>(w2));
        w0 = w1;
        w1 = w2;
        f0 = f1;
        f1 = f2;
        if (std::abs(w1) > kRescale) {
            w0 /= static_cast<Real>(kRescale);
            w1 /= static_cast<Real>(kRescale);
        }
    }
    return nodes.count();
}

struct LeastSquares2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

// min |x1 a + x2 b - y| by Gram-Schmidt with one reorthogonalization.
LeastSquares2 fit_two_columns(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& y)
{
    const auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            acc += u[i] * v[i];
        }
        return acc;
    };
    const double na = std::sqrt(dot(a, a));
    std::vector<double> q1(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        q1[i] = a[i] / na;
    }
    std::vector<double> v = b;
    double r12 = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const double c = dot(q1, v);
        r12 += c;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] -= c * q1[i];
        }
    }
    const double r22 = std::sqrt(dot(v, v));
    LeastSquares2 out;
    if (r22 == 0.0) {
        out.x1 = dot(q1, y) / na;
        return out;
    }
    for (double& x : v) {
        x /= r22;
    }
    out.x2 = dot(v, y) / r22;
    out.x1 = (dot(q1, y) - r12 * out.x2) / na;
    return out;
}

double trapezoid(const std::vector<double>& f, double h)
{
    if (f.size() < 2) {
        return 0.0;
    }
    double acc = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        acc += f[i];
    }
    return acc * h;
}

Branch branch_for(const SAEParameter& tau)
{
    if (tau.is_standard()) {
        return Branch::standard;
    }
    if (tau.is_additional()) {
        return Branch::additional;
    }
    return Branch::mixed;
}

std::string describe(double x)
{
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

bool same_problem(const RadialProblem& a, const RadialProblem& b)
{
    const bool tails = (!a.tail && !b.tail) || (a.tail && b.tail && a.tail->description == b.tail->description);
    return a.m == b.m && a.l == b.l && a.v0 == b.v0 && a.coulomb == b.coulomb && tails;
}

constexpr int kHeadDecades = 8;

// int_0^R r^j w1 w2 dr from the leading boundary behaviour
//   w = a_st r^P + a_add r^-P,  or  a_st + a_add ln r for P = 0.
double head_moment(const RadialSolution& s1, const RadialSolution& s2, double radius, int j)
{
    const double jj = j + 1.0;
    const double lr = std::log(radius);
    const double rj = std::pow(radius, jj);
    const double cross = s1.a_st * s2.a_add + s1.a_add * s2.a_st;
    if (s1.log_case) {
        const double i0 = rj / jj;
        const double i1 = rj * (lr / jj - 1.0 / (jj * jj));
        const double i2 = rj * (lr * lr / jj - 2.0 * lr / (jj * jj) + 2.0 / (jj * jj * jj));
        return s1.a_st * s2.a_st * i0 + cross * i1 + s1.a_add * s2.a_add * i2;
    }
    const double p = s1.p;
    const auto power = [&](double e) { return std::pow(radius, jj + e) / (jj + e); };
    double acc = s1.a_st * s2.a_st * power(2.0 * p);
    if (cross != 0.0) {
        acc += cross * power(0.0);
    }
    if (s1.a_add != 0.0 && s2.a_add != 0.0) {
        acc += s1.a_add * s2.a_add * power(-2.0 * p);
    }
    return acc;
}

RadialSolution integrate_on_mesh(const Setup& s, const Mesh& mesh, double energy)
{
    const std::size_t n = mesh.size();
    const double h = mesh.h;
    const std::vector<double> g = g_values(mesh, energy);

    // Matching point: outermost point with g < 1/4, but not beyond r_max / 3.
    const long third = static_cast<long>(n) - 1 - std::lround(std::log10(3.0) * mesh.ppd);
    long turn = -1;
    for (long i = static_cast<long>(n) - 1; i >= 0; --i) {
        if (g[static_cast<std::size_t>(i)] < 0.25) {
            turn = i;
            break;
        }
    }
    long im = turn >= 2 ? std::min(turn, third) : third;
    im = std::clamp(im, 2L, static_cast<long>(n) - 3);
    const std::size_t m = static_cast<std::size_t>(im);

    std::vector<Real> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = numerov_f(h, g[i]);
    }

    std::vector<Real> wo_ext(m + 2);
    wo_ext[0] = start_value(s, energy, mesh.r[0]);
    wo_ext[1] = start_value(s, energy, mesh.r[1]);
    for (std::size_t i = 2; i < wo_ext.size(); ++i) {
        wo_ext[i] = ((12.0L - 10.0L * f[i - 1]) * wo_ext[i - 1] - f[i - 2] * wo_ext[i - 2]) / f[i];
        if (std::abs(wo_ext[i]) > kRescale) {
            for (std::size_t j = 0; j <= i; ++j) {
                wo_ext[j] /= static_cast<Real>(kRescale);
            }
        }
    }

    std::vector<Real> wi_ext(n, 0.0L);
    wi_ext[n - 2] = 1.0L;
    for (std::size_t i = n - 2; i-- > m;) {
        wi_ext[i] = ((12.0L - 10.0L * f[i + 1]) * wi_ext[i + 1] - f[i + 2] * wi_ext[i + 2]) / f[i];
        if (std::abs(wi_ext[i]) > kRescale) {
            for (std::size_t j = i; j < n; ++j) {
                wi_ext[j] /= static_cast<Real>(kRescale);
            }
        }
    }
    const std::vector<double> wo(wo_ext.begin(), wo_ext.end());
    const std::vector<double> wi(wi_ext.begin(), wi_ext.end());

    RadialSolution sol;
    sol.energy = energy;
    sol.p = s.p;
    sol.log_case = s.log_case;
    sol.points_per_decade = mesh.ppd;
    sol.problem = s.problem;
    sol.r_match = mesh.r[m];

    const double wronskian = wo[m + 1] * wi[m] - wo[m] * wi[m + 1];
    const double no = std::hypot(wo[m], wo[m + 1]) / std::numbers::sqrt2;
    const double ni = std::hypot(wi[m], wi[m + 1]) / std::numbers::sqrt2;
    sol.matching_defect = wronskian / (h * no * ni);

    const double scale = (wo[m] * wi[m] + wo[m + 1] * wi[m + 1]) / (wi[m] * wi[m] + wi[m + 1] * wi[m + 1]);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = i <= m ? wo[i] : scale * wi[i];
    }

    NodeCounter nodes;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        nodes.push(w[i]);
    }
    sol.node_count = nodes.count();

    // Near-origin coefficients from the innermost quarter decade, where the
    // series misses only tail terms beyond the origin value.
    const std::size_t nfit = std::min(n, static_cast<std::size_t>(mesh.ppd / 4) + 1);
    std::vector<double> ca(nfit);
    std::vector<double> cb(nfit);
    std::vector<double> y(nfit);
    for (std::size_t i = 0; i < nfit; ++i) {
        const auto [bs, ba] = basis(s, energy, mesh.r[i]);
        ca[i] = bs;
        cb[i] = ba;
        y[i] = w[i];
    }
    if (s.log_case || s.p < 0.5) {
        const LeastSquares2 ls = fit_two_columns(ca, cb, y);
        sol.a_st = ls.x1;
        sol.a_add = ls.x2;
    } else {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < nfit; ++i) {
            num += ca[i] * y[i];
            den += ca[i] * ca[i];
        }
        sol.a_st = num / den;
        sol.a_add = 0.0;
    }

    // Below the mesh the series is exact enough; extend the stored solution
    // inward so integrals of singular weights converge.
    const std::size_t head = static_cast<std::size_t>(kHeadDecades) * static_cast<std::size_t>(mesh.ppd);
    sol.k_first = mesh.k_lo - static_cast<long>(head);
    sol.r.assign(head + n, 0.0);
    sol.u.assign(head + n, 0.0);
    for (std::size_t i = 0; i < head + n; ++i) {
        const double r = i < head ? lattice_radius(sol.k_first + static_cast<long>(i), mesh.ppd) : mesh.r[i - head];
        double wi_val = 0.0;
        if (i < head) {
            const auto [bs, ba] = basis(s, energy, r);
            wi_val = sol.a_st * bs + (sol.a_add == 0.0 ? 0.0 : sol.a_add * ba);
        } else {
            wi_val = w[i - head];
        }
        sol.r[i] = r;
        sol.u[i] = std::sqrt(r) * wi_val;
    }
    std::vector<double> density(sol.r.size());
    for (std::size_t i = 0; i < density.size(); ++i) {
        density[i] = sol.u[i] * sol.u[i] * sol.r[i];
    }
    sol.norm = trapezoid(density, h) + head_moment(sol, sol, sol.r.front(), 1);
    return sol;
}

double bisection_midpoint(double lo, double hi)
{
    if (lo < 0.0 && hi < 0.0 && lo < 2.0 * hi) {
        return -std::sqrt(lo * hi);
    }
    if (lo > 0.0 && hi > 2.0 * lo) {
        return std::sqrt(lo * hi);
    }
    return 0.5 * (lo + hi);
}

} // namespace

double RadialSolution::tau_fit() const
{
    if (a_st == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return a_add / a_st;
}

FrobeniusStart frobenius_coefficients(const RadialProblem& problem, double energy, int sign)
{
    const SingularityAnalysis a = analyze(problem);
    if (!a.p || a.regime == Regime::log_case) {
        throw RegimeError("frobenius_coefficients: power-law branches need P > 0");
    }
    FrobeniusStart st;
    st.exponent = 0.5 + (sign >= 0 ? 1.0 : -1.0) * *a.p;
    const double s = st.exponent;
    const double m = problem.m;
    const double t0 = problem.tail ? problem.tail->origin_value : 0.0;
    // c_n n (n + 2s - 1) = 2m coulomb c_{n-1} + 2m (t0 - E) c_{n-2}
    st.c1 = m * problem.coulomb / s;
    st.c2 = (2.0 * m * problem.coulomb * st.c1 + 2.0 * m * (t0 - energy)) / (4.0 * s + 2.0);
    return st;
}

RadialSolution integrate_radial(const RadialProblem& problem, double energy, const SAEParameter& tau,
                                const MeshSpec& spec)
{
    const Setup s = prepare(problem, tau);
    const double r_min = spec.r_min > 0.0 ? spec.r_min : auto_r_min(s, energy);
    const double r_max = spec.r_max > 0.0 ? spec.r_max : auto_r_max(s, energy, r_min, spec.decay_action);
    const Mesh mesh = make_mesh(s, r_min, r_max, spec.points_per_decade);
    return integrate_on_mesh(s, mesh, energy);
}

RadialSolution normalized(const RadialSolution& solution)
{
    if (!(solution.norm > 0.0)) {
        throw DomainError("cannot normalize a solution with zero norm");
    }
    RadialSolution out = solution;
    const double c = 1.0 / std::sqrt(solution.norm);
    for (double& x : out.u) {
        x *= c;
    }
    out.a_st *= c;
    out.a_add *= c;
    out.norm = 1.0;
    return out;
}

double overlap(const RadialSolution& s1, const RadialSolution& s2)
{
    if (s1.points_per_decade != s2.points_per_decade) {
        throw DomainError("overlap requires solutions on the same lattice");
    }
    const long lo = std::max(s1.k_first, s2.k_first);
    const long hi = std::min(s1.k_first + static_cast<long>(s1.r.size()), s2.k_first + static_cast<long>(s2.r.size()));
    std::vector<double> f;
    for (long k = lo; k < hi; ++k) {
        const std::size_t i1 = static_cast<std::size_t>(k - s1.k_first);
        const std::size_t i2 = static_cast<std::size_t>(k - s2.k_first);
        f.push_back(s1.u[i1] * s2.u[i2] * s1.r[i1]);
    }
    const double r_lo = std::max(s1.r.front(), s2.r.front());
    return trapezoid(f, std::numbers::ln10 / s1.points_per_decade) + head_moment(s1, s2, r_lo, 1);
}

int sturm_count(const RadialProblem& problem, double energy, const SAEParameter& tau, const MeshSpec& spec)
{
    const Setup s = prepare(problem, tau);
    const double r_min = spec.r_min > 0.0 ? spec.r_min : auto_r_min(s, energy);
    const double r_max = spec.r_max > 0.0 ? spec.r_max : auto_r_max(s, energy, r_min, spec.decay_action);
    return count_outward(s, make_mesh(s, r_min, r_max, spec.points_per_decade), energy);
}

SpectrumResult find_levels(const RadialProblem& problem, const SAEParameter& tau, std::pair<double, double> window,
                           int max_states, const MeshSpec& spec)
{
    const Setup s = prepare(problem, tau);
    const auto [e_lo, e_hi] = window;
    if (!(e_lo < e_hi)) {
        throw DomainError("find_levels: empty energy window");
    }
    if (max_states <= 0) {
        throw DomainError("find_levels: max_states must be positive");
    }
    const double r_min = spec.r_min > 0.0 ? spec.r_min : auto_r_min(s, e_lo);
    const double r_max = spec.r_max > 0.0 ? spec.r_max : auto_r_max(s, e_hi, r_min, spec.decay_action);

    SpectrumResult out;
    out.problem = problem;
    out.tau = tau;

    std::map<double, int> counts;
    const auto count_at = [&](double e) {
        const auto it = counts.find(e);
        if (it != counts.end()) {
            return it->second;
        }
        // The outer end follows the energy: far past the turning point the
        // Numerov step is no longer small against the decay length.
        const double r_end = spec.r_max > 0.0 ? spec.r_max : auto_r_max(s, e, r_min, spec.decay_action);
        const int c = count_outward(s, make_mesh(s, r_min, r_end, spec.points_per_decade), e);
        counts.emplace(e, c);
        return c;
    };
    const int n_lo = count_at(e_lo);
    const int n_hi = count_at(e_hi);
    const int last = std::min(n_hi, n_lo + max_states);

    MeshSpec eig = spec;
    eig.r_min = r_min;
    eig.r_max = 0.0;
    for (int k = n_lo; k < last; ++k) {
        // Tightest known bracket with N(lo) <= k < N(hi).
        double lo = e_lo;
        double hi = e_hi;
        for (const auto& [e, c] : counts) {
            if (c <= k) {
                lo = std::max(lo, e);
            } else {
                hi = std::min(hi, e);
            }
        }
        int iterations = 0;
        while (hi - lo > 1e-14 * std::max(std::abs(lo), std::abs(hi)) && iterations < 400) {
            const double mid = bisection_midpoint(lo, hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            if (count_at(mid) <= k) {
                lo = mid;
            } else {
                hi = mid;
            }
            ++iterations;
        }
        const double energy = 0.5 * (lo + hi);

        BoundState st;
        st.energy = energy;
        st.n_r = k;
        st.branch = branch_for(tau);
        st.source = Source::oracle;
        if (problem.coulomb != 0.0 && energy < 0.0) {
            st.lambda = std::abs(problem.coulomb) * std::sqrt(problem.m / (-2.0 * energy));
        }
        try {
            const RadialSolution sol = integrate_radial(problem, energy, tau, eig);
            st.node_count = sol.node_count;
            if (sol.node_count != k) {
                out.diagnostics.push_back("level " + std::to_string(k) + " has " + std::to_string(sol.node_count) +
                                          " nodes");
            }
        } catch (const DomainError& e) {
            out.diagnostics.push_back("level " + std::to_string(k) + ": eigenfunction unavailable: " + e.what());
        }
        out.diagnostics.push_back("level " + std::to_string(k) + ": " + std::to_string(iterations) +
                                  " bisection steps, E = " + describe(energy));
        out.states.push_back(st);
    }
    if (static_cast<int>(out.states.size()) < max_states) {
        out.diagnostics.push_back("window (" + describe(e_lo) + ", " + describe(e_hi) + ") holds " +
                                  std::to_string(out.states.size()) + " of " + std::to_string(max_states) +
                                  " requested levels");
    }
    out.metadata.emplace_back("r_min", r_min);
    out.metadata.emplace_back("r_max", r_max);
    out.metadata.emplace_back("points_per_decade", spec.points_per_decade);
    return out;
}

SpectrumResult find_lowest_levels(const RadialProblem& problem, const SAEParameter& tau, int count,
                                  const MeshSpec& spec)
{
    const Setup s = prepare(problem, tau);
    if (count <= 0) {
        throw DomainError("find_lowest_levels: count must be positive");
    }
    const auto count_below = [&](double e, double r_min) {
        const double r_max = spec.r_max > 0.0 ? spec.r_max : auto_r_max(s, e, r_min, spec.decay_action);
        return count_outward(s, make_mesh(s, r_min, r_max, spec.points_per_decade), e);
    };
    double e_lo = -1.0;
    double r_min = 0.0;
    for (int i = 0; i < 40; ++i) {
        r_min = spec.r_min > 0.0 ? spec.r_min : auto_r_min(s, e_lo);
        if (count_below(e_lo, r_min) == 0) {
            break;
        }
        e_lo *= 10.0;
    }
    std::vector<double> candidates;
    for (double e = e_lo / 10.0; e < -1e-12; e /= 10.0) {
        candidates.push_back(e);
    }
    for (double e = 1e-3; e < 1e12; e *= 2.0) {
        candidates.push_back(e);
    }
    double e_hi = candidates.front();
    for (double e : candidates) {
        int n = 0;
        try {
            n = count_below(e, r_min);
        } catch (const DomainError&) {
            break;
        }
        e_hi = e;
        if (n >= count) {
            break;
        }
    }
    MeshSpec fixed = spec;
    fixed.r_min = r_min;
    return find_levels(problem, tau, {e_lo, e_hi}, count, fixed);
}

RadialSolution eigenfunction(const RadialProblem& problem, const SAEParameter& tau, double energy,
                             const MeshSpec& mesh)
{
    return normalized(integrate_radial(problem, energy, tau, mesh));
}

VirialReport virial(const RadialSolution& solution, const RadialProblem& problem)
{
    if (std::abs(solution.norm - 1.0) > 1e-8) {
        throw DomainError("virial requires a normalized solution");
    }
    if (!same_problem(solution.problem, problem)) {
        throw DomainError("virial: solution belongs to a different problem");
    }
    const std::size_t n = solution.r.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = solution.r[i];
        // V + r V'/2 without the inverse-square part, which cancels.
        double v = problem.coulomb / (2.0 * r);
        if (problem.tail) {
            const auto& t = problem.tail->potential;
            const double d = 1e-5 * r;
            v += t(r) + 0.5 * r * (t(r + d) - t(r - d)) / (2.0 * d);
        }
        f[i] = solution.u[i] * solution.u[i] * v * r;
    }
    VirialReport rep;
    const double t0 = problem.tail ? problem.tail->origin_value : 0.0;
    rep.expectation = trapezoid(f, std::numbers::ln10 / solution.points_per_decade) +
                      0.5 * problem.coulomb * head_moment(solution, solution, solution.r.front(), 0) +
                      t0 * head_moment(solution, solution, solution.r.front(), 1);
    if (solution.log_case) {
        rep.boundary_term = -solution.a_add * solution.a_add / (4.0 * problem.m);
    } else {
        rep.boundary_term = solution.p * solution.p / problem.m * solution.a_st * solution.a_add;
    }
    rep.naive = solution.energy - rep.expectation;
    rep.generalized = rep.naive - rep.boundary_term;
    return rep;
}

double virial_residual(const RadialSolution& solution, const RadialProblem& problem)
{
    return virial(solution, problem).generalized;
}

double orthogonality_defect(const RadialSolution& s1, const RadialSolution& s2)
{
    if (!same_problem(s1.problem, s2.problem)) {
        throw DomainError("orthogonality_defect: solutions belong to different problems");
    }
    if (s1.log_case) {
        return 0.5 * (s1.a_st * s2.a_add - s2.a_st * s1.a_add);
    }
    return s1.p * (s2.a_st * s1.a_add - s1.a_st * s2.a_add);
}

std::string_view to_string(BracketClass c)
{
    return c == BracketClass::identically_zero ? "identically_zero" : "nonzero";
}

BracketResult boundary_bracket_class(std::pair<double, double> exponents, EquationKind kind)
{
    const auto [pk, pk2] = exponents;
    BracketResult res;
    if (kind == EquationKind::dirac) {
        // f_k g_k' - f_k' g_k: independent component coefficients, no cancellation.
        res.kind = BracketClass::nonzero;
        res.limiting_power = pk + pk2;
        return res;
    }
    // u_k u_k'' - u_k' u_k'' ~ a a' (p' - p) r^{p + p' - 1}
    res.limiting_power = pk + pk2 - 1.0;
    res.kind = std::abs(pk - pk2) <= 1e-12 * std::max(1.0, std::abs(pk)) ? BracketClass::identically_zero
                                                                          : BracketClass::nonzero;
    return res;
}

E0Nodes e0_nodes(const RadialProblem& problem, const SAEParameter& tau, const MeshSpec& spec)
{
    const Setup s = prepare(problem, tau);
    if (analyze(problem).regime != Regime::two_branch) {
        throw RegimeError("e0_node_count requires the TWO_BRANCH regime");
    }
    double r_min = spec.r_min;
    if (!(r_min > 0.0)) {
        const double r0 = crossover_radius(s);
        r_min = std::isfinite(r0) ? std::max(std::min(auto_r_min(s, 0.0), 1e-3 * r0), kSmallestRMin)
                                  : auto_r_min(s, 0.0);
    }
    double r_max = spec.r_max;
    if (!(r_max > 0.0)) {
        try {
            r_max = auto_r_max(s, 0.0, r_min, spec.decay_action);
        } catch (const DomainError&) {
            const double r0 = crossover_radius(s);
            r_max = 1e6 * std::max(natural_length(s, 0.0), std::isfinite(r0) ? r0 : 0.0);
        }
    }
    const Mesh mesh = make_mesh(s, r_min, r_max, spec.points_per_decade);
    const std::vector<double> g = g_values(mesh, 0.0);
    const double h = mesh.h;

    E0Nodes out;
    Real w0 = start_value(s, 0.0, mesh.r[0]);
    Real w1 = start_value(s, 0.0, mesh.r[1]);
    NodeCounter nodes;
    nodes.push(static_cast<double>(w0));
    nodes.push(static_cast<double>(w1));
    for (std::size_t i = 2; i < g.size(); ++i) {
        const Real w2 = ((12.0L - 10.0L * numerov_f(h, g[i - 1])) * w1 - numerov_f(h, g[i - 2]) * w0) /
                        numerov_f(h, g[i]);
        if (nodes.push(static_cast<double>(w2))) {
            const double x1 = std::log(mesh.r[i - 1]);
            const double t = w1 != 0.0L ? static_cast<double>(w1 / (w1 - w2)) : 0.0;
            out.radii.push_back(std::exp(x1 + t * h));
        }
        w0 = w1;
        w1 = w2;
        if (std::abs(w1) > kRescale) {
            w0 /= static_cast<Real>(kRescale);
            w1 /= static_cast<Real>(kRescale);
        }
    }
    out.count = nodes.count();
    return out;
}

int e0_node_count(const RadialProblem& problem, const SAEParameter& tau, const MeshSpec& mesh)
{
    return e0_nodes(problem, tau, mesh).count;
}

SpacingReport spacing_report(const RadialProblem& problem, const SAEParameter& tau, int n_levels,
                             const MeshSpec& mesh)
{
    if (!problem.tail) {
        throw DomainError("spacing_report needs a confining or sinh^-2 tail");
    }
    if (n_levels < 3) {
        throw DomainError("spacing_report needs at least three levels");
    }
    const SpectrumResult levels = find_lowest_levels(problem, tau, n_levels, mesh);
    if (static_cast<int>(levels.states.size()) < n_levels) {
        throw DomainError("spacing_report: only " + std::to_string(levels.states.size()) + " levels found");
    }
    SpacingReport rep;
    for (const BoundState& st : levels.states) {
        rep.energies.push_back(st.energy);
    }
    for (std::size_t i = 1; i < rep.energies.size(); ++i) {
        rep.gaps.push_back(rep.energies[i] - rep.energies[i - 1]);
    }
    for (double gap : rep.gaps) {
        rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(gap / rep.gaps.front() - 1.0));
    }
    rep.equidistant = rep.max_relative_deviation < 1e-4;
    return rep;
}

} // namespace sae::oracle
