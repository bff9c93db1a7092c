#pragma once

// Real-order special functions used by the eigenvalue equations.
//
// Everything here is double precision, pure and thread-safe. Functions throw
// sae::PoleError at poles, sae::CancellationError when a series leaves its
// accuracy budget, and sae::DomainError outside the supported argument ranges.

namespace sae::specfun {

/// log|x| together with the sign of x. sign == 0 iff x == 0.
struct SignedLogValue {
    double log_magnitude = 0.0;
    int sign = 1;

    [[nodiscard]] double value() const;
};

/// Largest |z| for which kummer_m guarantees ~1e-10 relative accuracy.
inline constexpr double kKummerZBudget = 30.0;

/// True if x is 0, -1, -2, ...
bool is_nonpositive_integer(double x);

/// sin(pi x) and cos(pi x) with exact argument reduction.
double sin_pi(double x);
double cos_pi(double x);

/// Gamma(x) in log space. Lanczos (g = 7, 9 terms), reflection below 1/2.
SignedLogValue log_gamma(double x);

double gamma(double x);

/// 1/Gamma(x); exactly zero at the poles of Gamma.
double recip_gamma(double x);

/// Gamma(a)/Gamma(b) with sign tracking.
/// Returns 0 when b is a pole of Gamma (the ratio's limit); throws if a is.
double gamma_ratio(double a, double b);

/// Logarithmic derivative of Gamma.
double digamma(double x);

/// Kummer's confluent hypergeometric function M(a, b; z) = 1F1(a; b; z).
/// Direct term recurrence with compensated summation, |z| <= kKummerZBudget.
double kummer_m(double a, double b, double z);

/// Tricomi's confluent hypergeometric function U(a, b; z), z > 0.
///
/// The asymptotic series in 1/z is used when it terminates or converges to
/// full precision. Otherwise U comes from its integral representation,
///   U = 1/G(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,
/// at a shifted into [1, 2) and carried back down by the three-term
/// recurrence in a. Neither step cancels, so integer b is not special.
double tricomi_u(double a, double b, double z);

/// Whittaker W_{kappa,mu}(x) = e^{-x/2} x^{1/2+mu} U(1/2+mu-kappa, 1+2mu, x).
double whittaker_w(double kappa, double mu, double x);

/// Modified Bessel function of the first kind, real order.
double bessel_i(double nu, double x);

/// Macdonald function K_nu(x), x > 0, from the trapezoidal rule applied to
///   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
/// which converges geometrically and has no cancellation at integer order.
double bessel_k(double nu, double x);

} // namespace sae::specfun
