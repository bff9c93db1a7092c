#include "sae/sae_parameter.hpp"

#include "sae/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sae {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

} // namespace

SAEParameter SAEParameter::from_tau(double tau)
{
    if (std::isnan(tau)) {
        throw DomainError("tau must not be NaN");
    }
    SAEParameter p;
    if (std::isinf(tau)) {
        p.infinite_ = true;
        p.tau_ = std::numeric_limits<double>::infinity();
        p.theta_ = kHalfPi;
        return p;
    }
    p.tau_ = tau;
    p.theta_ = std::atan(tau);
    return p;
}

SAEParameter SAEParameter::from_theta(double theta)
{
    if (!std::isfinite(theta)) {
        throw DomainError("theta must be finite");
    }
    // tan has period pi: bring theta into (-pi/2, pi/2].
    double t = std::remainder(theta, std::numbers::pi);
    if (std::abs(std::cos(t)) < 1e-15) {
        return from_tau(std::numeric_limits<double>::infinity());
    }
    if (t <= -kHalfPi) {
        t += std::numbers::pi;
    }
    SAEParameter p;
    p.theta_ = t;
    p.tau_ = t == 0.0 ? 0.0 : std::tan(t);
    return p;
}

std::pair<double, double> SAEParameter::weights() const
{
    if (infinite_) {
        return {0.0, 1.0};
    }
    const double n = std::hypot(1.0, tau_);
    return {1.0 / n, tau_ / n};
}

} // namespace sae
