#pragma once

// Self-adjoint extension parameter tau = a_add / a_st, the ratio of the
// additional to the standard near-origin coefficient. tau carries dimension
// length^{2P}; it is stored as an angle so that tau = +-inf is an ordinary value.

#include <limits>
#include <utility>

namespace sae {

class SAEParameter {
public:
    /// tau = 0: pure standard branch.
    SAEParameter() = default;

    /// Any real tau; +-infinity both map to the additional branch.
    static SAEParameter from_tau(double tau);

    /// theta is reduced into (-pi/2, pi/2]; |cos theta| < 1e-15 is tau = inf.
    static SAEParameter from_theta(double theta);

    static SAEParameter standard() { return {}; }
    static SAEParameter additional() { return from_tau(kInfinity); }

    /// +infinity for the additional branch.
    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] double theta() const { return theta_; }

    [[nodiscard]] bool is_standard() const { return tau_ == 0.0; }
    [[nodiscard]] bool is_additional() const { return infinite_; }
    [[nodiscard]] bool is_finite() const { return !infinite_; }

    /// Boundary weights (w_st, w_add), unit length, w_add / w_st = tau.
    [[nodiscard]] std::pair<double, double> weights() const;

    bool operator==(const SAEParameter& other) const = default;

private:
    static constexpr double kInfinity = std::numeric_limits<double>::infinity();

    double theta_ = 0.0;
    double tau_ = 0.0;
    bool infinite_ = false;
};

} // namespace sae
