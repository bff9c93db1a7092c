#include "sae/specfun.hpp"

#include "sae/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sae::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

// Directly evaluated Gamma is used below this magnitude; beyond it log space.
constexpr double kDirectGammaLimit = 160.0;

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double lanczos_series(double x1)
{
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        a += kLanczos[i] / (x1 + static_cast<double>(i));
    }
    return a;
}

// Gamma(x) for x >= 0.5, evaluated without going through exp(log).
double gamma_positive(double x)
{
    const double x1 = x - 1.0;
    const double t = x1 + kLanczosG + 0.5;
    const double half_power = std::pow(t, 0.5 * (x1 + 0.5));
    return std::sqrt(2.0 * kPi) * half_power * std::exp(-t) * half_power * lanczos_series(x1);
}

double log_gamma_positive(double x)
{
    const double x1 = x - 1.0;
    const double t = x1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (x1 + 0.5) * std::log(t) - t + std::log(lanczos_series(x1));
}

[[noreturn]] void throw_pole(const char* fn, double x)
{
    throw PoleError(std::string(fn) + ": pole at x = " + std::to_string(x));
}

// z^{-a} sum_n (a)_n (a-b+1)_n / n! (-1/z)^n, if it terminates or converges.
bool tricomi_asymptotic(double a, double b, double z, double& out)
{
    const double c = a - b + 1.0;
    CompensatedSum sum;
    double term = 1.0;
    sum.add(term);
    double previous = std::abs(term);
    for (int n = 0; n < 400; ++n) {
        const double next = term * (a + n) * (c + n) / (static_cast<double>(n + 1) * -z);
        if (next == 0.0) {
            out = std::pow(z, -a) * sum.value();
            return true;
        }
        if (std::abs(next) > previous && n > 2) {
            return false;
        }
        sum.add(next);
        term = next;
        previous = std::abs(next);
        if (std::abs(next) < 0.25 * kEps * std::abs(sum.value())) {
            out = std::pow(z, -a) * sum.value();
            return true;
        }
    }
    return false;
}

// U(a, b, z) = 1/Gamma(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt for a >= 1,
// trapezoidal rule after t = exp(pi/2 sinh s). The integrand decays doubly
// exponentially at both ends so the rule converges geometrically in 1/h.
double tricomi_integral(double a, double b, double z)
{
    constexpr double h = 1.0 / 32.0;
    const auto log_f = [&](double s) {
        const double x = 0.5 * kPi * std::sinh(s);
        const double t = std::exp(x);
        return -z * t + a * x + (b - a - 1.0) * std::log1p(t) + std::log(0.5 * kPi * std::cosh(s));
    };
    // centre the grid on the peak of the integrand
    double peak = 0.0;
    double peak_log = log_f(0.0);
    for (double s = -8.0; s <= 8.0; s += 0.125) {
        const double v = log_f(s);
        if (v > peak_log) {
            peak_log = v;
            peak = s;
        }
    }
    CompensatedSum sum;
    sum.add(1.0);
    for (int dir : {-1, 1}) {
        for (int k = 1; k < 4000; ++k) {
            const double v = log_f(peak + dir * k * h) - peak_log;
            if (v < -42.0) {
                break;
            }
            sum.add(std::exp(v));
        }
    }
    return std::exp(peak_log - log_gamma_positive(a) + std::log(h * sum.value()));
}

} // namespace

double SignedLogValue::value() const
{
    if (sign == 0) {
        return 0.0;
    }
    return static_cast<double>(sign) * std::exp(log_magnitude);
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double sin_pi(double x)
{
    if (!std::isfinite(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double r = x - 2.0 * std::nearbyint(0.5 * x); // exact, r in [-1, 1]
    if (r > 0.5) {
        return std::sin(kPi * (1.0 - r));
    }
    if (r < -0.5) {
        return -std::sin(kPi * (1.0 + r));
    }
    return std::sin(kPi * r);
}

double cos_pi(double x)
{
    if (!std::isfinite(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double r = std::abs(x - 2.0 * std::nearbyint(0.5 * x));
    return sin_pi(0.5 - r);
}

SignedLogValue log_gamma(double x)
{
    if (is_nonpositive_integer(x)) {
        throw_pole("log_gamma", x);
    }
    if (std::isnan(x)) {
        throw DomainError("log_gamma: NaN argument");
    }
    if (x >= 0.5) {
        return {log_gamma_positive(x), 1};
    }
    // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
    const double s = sin_pi(x);
    return {std::log(kPi) - std::log(std::abs(s)) - log_gamma_positive(1.0 - x), s > 0.0 ? 1 : -1};
}

double gamma(double x)
{
    if (is_nonpositive_integer(x)) {
        throw_pole("gamma", x);
    }
    if (x >= 0.5) {
        if (x <= kDirectGammaLimit) {
            return gamma_positive(x);
        }
        return log_gamma(x).value();
    }
    if (x > -kDirectGammaLimit) {
        return kPi / (sin_pi(x) * gamma_positive(1.0 - x));
    }
    return log_gamma(x).value();
}

double recip_gamma(double x)
{
    if (is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (std::abs(x) <= kDirectGammaLimit) {
        if (x >= 0.5) {
            return 1.0 / gamma_positive(x);
        }
        return sin_pi(x) * gamma_positive(1.0 - x) / kPi;
    }
    const SignedLogValue lg = log_gamma(x);
    return static_cast<double>(lg.sign) * std::exp(-lg.log_magnitude);
}

double gamma_ratio(double a, double b)
{
    if (is_nonpositive_integer(a)) {
        throw_pole("gamma_ratio (numerator)", a);
    }
    if (is_nonpositive_integer(b)) {
        return 0.0;
    }
    if (std::abs(a) <= kDirectGammaLimit && std::abs(b) <= kDirectGammaLimit) {
        return gamma(a) * recip_gamma(b);
    }
    const SignedLogValue la = log_gamma(a);
    const SignedLogValue lb = log_gamma(b);
    return static_cast<double>(la.sign * lb.sign) * std::exp(la.log_magnitude - lb.log_magnitude);
}

double digamma(double x)
{
    if (is_nonpositive_integer(x)) {
        throw_pole("digamma", x);
    }
    if (x < 0.0) {
        // psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - kPi * cos_pi(x) / sin_pi(x);
    }
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // Bernoulli tail: -sum B_2k / (2k x^2k)
    const double tail =
        inv2 * (-1.0 / 12.0 +
                inv2 * (1.0 / 120.0 +
                        inv2 * (-1.0 / 252.0 +
                                inv2 * (1.0 / 240.0 +
                                        inv2 * (-1.0 / 132.0 + inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    return shift + std::log(x) - 0.5 / x + tail;
}

double kummer_m(double a, double b, double z)
{
    if (is_nonpositive_integer(b)) {
        throw PoleError("kummer_m: b = " + std::to_string(b) + " is a non-positive integer");
    }
    if (std::abs(z) > kKummerZBudget) {
        throw CancellationError("kummer_m: |z| = " + std::to_string(z) + " exceeds the accuracy budget");
    }
    if (z < 0.0) {
        return std::exp(z) * kummer_m(b - a, b, -z);
    }
    CompensatedSum sum;
    double term = 1.0;
    sum.add(term);
    const double settle = std::abs(a) + std::abs(b) + 1.0;
    for (int k = 0; k < 5000; ++k) {
        const double ak = a + k;
        if (ak == 0.0) {
            return sum.value(); // polynomial case
        }
        term *= ak / (b + k) * z / static_cast<double>(k + 1);
        sum.add(term);
        const bool decreasing = std::abs(ak * z) < std::abs((b + k) * (k + 1));
        if (k > settle && decreasing && std::abs(term) <= 0.25 * kEps * std::abs(sum.value())) {
            return sum.value();
        }
    }
    throw CancellationError("kummer_m: series did not converge");
}

double tricomi_u(double a, double b, double z)
{
    if (!(z > 0.0)) {
        throw DomainError("tricomi_u: z must be positive");
    }
    double value = 0.0;
    if (tricomi_asymptotic(a, b, z, value)) {
        return value;
    }
    if (a >= 1.0) {
        return tricomi_integral(a, b, z);
    }
    // U is minimal as a grows, so the recurrence is run toward smaller a:
    //   U(a-1) = (2a + z - b) U(a) - a (a - b + 1) U(a+1)
    const int n = static_cast<int>(std::ceil(1.0 - a));
    const double top = a + n;
    double u1 = tricomi_integral(top + 1.0, b, z);
    double u0 = tricomi_integral(top, b, z);
    for (int k = 0; k < n; ++k) {
        const double ak = top - k;
        const double next = (2.0 * ak + z - b) * u0 - ak * (ak - b + 1.0) * u1;
        u1 = u0;
        u0 = next;
    }
    return u0;
}

double whittaker_w(double kappa, double mu, double x)
{
    if (!(x > 0.0)) {
        throw DomainError("whittaker_w: x must be positive");
    }
    const double u = tricomi_u(0.5 + mu - kappa, 1.0 + 2.0 * mu, x);
    const double value = u * std::exp(-0.5 * x + (0.5 + mu) * std::log(x));
    if (!std::isfinite(value)) {
        throw DomainError("whittaker_w: overflow");
    }
    return value;
}

double bessel_i(double nu, double x)
{
    if (x < 0.0) {
        throw DomainError("bessel_i: x must be non-negative");
    }
    if (nu < 0.0 && nu == std::floor(nu)) {
        nu = -nu; // I_{-n} = I_n
    }
    if (x == 0.0) {
        if (nu == 0.0) {
            return 1.0;
        }
        if (nu > 0.0) {
            return 0.0;
        }
        throw DomainError("bessel_i: I_nu(0) diverges for negative non-integer order");
    }
    if (x > 50.0) {
        // e^x / sqrt(2 pi x) * sum (-1)^k a_k(nu) / x^k
        const double mu = 4.0 * nu * nu;
        CompensatedSum sum;
        double term = 1.0;
        sum.add(term);
        for (int k = 1; k < 60; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double next = -term * (mu - odd * odd) / (8.0 * k * x);
            if (std::abs(next) >= std::abs(term)) {
                break;
            }
            sum.add(next);
            term = next;
            if (std::abs(term) < 0.25 * kEps * std::abs(sum.value())) {
                break;
            }
        }
        return std::exp(x) / std::sqrt(2.0 * kPi * x) * sum.value();
    }
    const double half = 0.5 * x;
    const double q = half * half;
    double term = std::pow(half, nu) * recip_gamma(nu + 1.0);
    CompensatedSum sum;
    sum.add(term);
    for (int k = 0; k < 1000; ++k) {
        term *= q / (static_cast<double>(k + 1) * (k + 1.0 + nu));
        sum.add(term);
        if (k > q && std::abs(term) <= 0.25 * kEps * std::abs(sum.value())) {
            break;
        }
    }
    return sum.value();
}

double bessel_k(double nu, double x)
{
    if (!(x > 0.0)) {
        throw DomainError("bessel_k: x must be positive");
    }
    nu = std::abs(nu);
    // Integrand scaled by e^{x}: exp(-x (cosh t - 1)) cosh(nu t).
    const double h = std::min(0.1, 0.5 / std::sqrt(x));
    CompensatedSum sum;
    sum.add(0.5);
    for (int k = 1; k < 100000; ++k) {
        const double t = k * h;
        const double exponent = -x * (std::cosh(t) - 1.0);
        const double f = 0.5 * (std::exp(exponent + nu * t) + std::exp(exponent - nu * t));
        sum.add(f);
        if (exponent + nu * t < -45.0) {
            break;
        }
    }
    return h * sum.value() * std::exp(-x);
}

} // namespace sae::specfun
