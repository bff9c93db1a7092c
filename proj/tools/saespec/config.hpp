#pragma once

#include "sae/sae_parameter.hpp"
#include "sae/singular.hpp"

#include <optional>
#include <string>
#include <vector>

namespace saespec {

enum class Command { classify, spectrum, oracle_verify, sweep, specfun_eval };

std::string to_string(Command c);

struct SweepSpec {
    std::string parameter = "tau"; // tau, theta, v0, coulomb, m
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool geometric = false;
};

struct RunConfig {
    Command command = Command::classify;

    double m = 1.0;
    int l = 0;
    double v0 = 0.0;
    double coulomb = 0.0;
    std::string tail; // "", "harmonic:<g>" or "sinh2:<a>"

    // at most one of the two; neither means tau = 0
    std::optional<std::string> tau;
    std::optional<double> theta;

    int count = 3;
    double fall_c = 0.0; // phase constant of the fall tower
    int fall_n_lo = 0;

    std::string format = "json";
    std::string output; // empty: stdout
    double tolerance = 1e-6;
    int points_per_decade = 2000;
    int jobs = 0; // 0: hardware concurrency

    SweepSpec sweep;

    std::string function;
    std::vector<double> args;

    std::string report; // oracle-verify target
};

/// Throws sae::DomainError for malformed values.
sae::SAEParameter parse_tau(const std::string& text);

sae::SAEParameter tau_of(const RunConfig& config);

/// Problem described by the config; throws for an unknown tail spec.
sae::RadialProblem problem_of(const RunConfig& config);

/// Checks cross-field constraints; throws std::invalid_argument (a usage error).
void check(const RunConfig& config);

/// Grid of the sweep parameter in order.
std::vector<double> sweep_grid(const SweepSpec& sweep);

} // namespace saespec
