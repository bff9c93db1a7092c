#include "saespec/config.hpp"

#include "sae/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace saespec {

std::string to_string(Command c)
{
    switch (c) {
    case Command::classify: return "classify";
    case Command::spectrum: return "spectrum";
    case Command::oracle_verify: return "oracle-verify";
    case Command::sweep: return "sweep";
    case Command::specfun_eval: return "specfun-eval";
    }
    return "?";
}

namespace {

double parse_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(text, &used);
    } catch (const std::exception&) {
        throw sae::DomainError("cannot parse " + what + " '" + text + "'");
    }
    if (used != text.size()) {
        throw sae::DomainError("trailing characters in " + what + " '" + text + "'");
    }
    return x;
}

} // namespace

sae::SAEParameter parse_tau(const std::string& text)
{
    if (text == "inf" || text == "+inf" || text == "-inf" || text == "infinity") {
        return sae::SAEParameter::additional();
    }
    const double t = parse_number(text, "tau");
    if (std::isnan(t)) {
        throw sae::DomainError("tau must not be NaN");
    }
    return sae::SAEParameter::from_tau(t);
}

sae::SAEParameter tau_of(const RunConfig& config)
{
    if (config.theta) {
        return sae::SAEParameter::from_theta(*config.theta);
    }
    if (config.tau) {
        return parse_tau(*config.tau);
    }
    return sae::SAEParameter::standard();
}

sae::RadialProblem problem_of(const RunConfig& config)
{
    sae::RadialProblem p;
    p.m = config.m;
    p.l = config.l;
    p.v0 = config.v0;
    p.coulomb = config.coulomb;
    if (!config.tail.empty()) {
        const auto colon = config.tail.find(':');
        if (colon == std::string::npos) {
            throw sae::DomainError("tail spec must look like harmonic:<g> or sinh2:<a>");
        }
        const std::string kind = config.tail.substr(0, colon);
        const double x = parse_number(config.tail.substr(colon + 1), "tail parameter");
        if (kind == "harmonic") {
            p.tail = sae::harmonic_tail(x);
        } else if (kind == "sinh2") {
            p.tail = sae::sinh_squared_tail(x, config.v0);
        } else {
            throw sae::DomainError("unknown tail '" + kind + "'");
        }
    }
    sae::validate(p);
    return p;
}

void check(const RunConfig& config)
{
    if (config.tau && config.theta) {
        throw std::invalid_argument("--tau and --theta are mutually exclusive");
    }
    if (config.count < 1) {
        throw std::invalid_argument("--count must be at least 1");
    }
    if (config.format != "json" && config.format != "csv") {
        throw std::invalid_argument("--format must be json or csv");
    }
    if (config.format == "csv" && config.command != Command::sweep) {
        throw std::invalid_argument("csv output is only available for sweep");
    }
    if (config.command == Command::sweep) {
        const SweepSpec& s = config.sweep;
        if (s.count < 2) {
            throw std::invalid_argument("sweep grid needs --points >= 2");
        }
        if (s.parameter != "tau" && s.parameter != "theta" && s.parameter != "v0" && s.parameter != "coulomb" &&
            s.parameter != "m") {
            throw std::invalid_argument("unknown sweep parameter '" + s.parameter + "'");
        }
        if (s.geometric && !(s.min * s.max > 0.0)) {
            throw std::invalid_argument("geometric grids need min and max of the same sign, nonzero");
        }
        if ((s.parameter == "tau" && config.theta) || (s.parameter == "theta" && config.tau)) {
            throw std::invalid_argument("sweep parameter conflicts with the fixed --tau/--theta");
        }
    }
    if (config.command == Command::specfun_eval && config.function.empty()) {
        throw std::invalid_argument("specfun-eval needs --function");
    }
}

std::vector<double> sweep_grid(const SweepSpec& sweep)
{
    std::vector<double> grid(static_cast<std::size_t>(sweep.count));
    for (int i = 0; i < sweep.count; ++i) {
        const double t = static_cast<double>(i) / (sweep.count - 1);
        double x = 0.0;
        if (sweep.geometric) {
            x = sweep.min * std::pow(sweep.max / sweep.min, t);
        } else {
            x = sweep.min + t * (sweep.max - sweep.min);
        }
        grid[static_cast<std::size_t>(i)] = x;
    }
    grid.back() = sweep.max;
    return grid;
}

} // namespace saespec
