#include "saespec/report.hpp"

#include "sae/errors.hpp"

#include <cmath>
#include <cstdio>

namespace saespec {

Json number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0.0 ? "inf" : "-inf";
    }
    return x;
}

double read_number(const Json& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    const std::string s = j.get<std::string>();
    if (s == "inf") {
        return HUGE_VAL;
    }
    if (s == "-inf") {
        return -HUGE_VAL;
    }
    return std::nan("");
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write(const Json& j, std::string& out, int depth)
{
    const auto pad = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            pad(depth + 1);
            out += Json(key).dump();
            out += ": ";
            write(value, out, depth + 1);
        }
        out += "\n";
        pad(depth);
        out += "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) {
                out += ",\n";
            }
            pad(depth + 1);
            write(j[i], out, depth + 1);
        }
        out += "\n";
        pad(depth);
        out += "]";
        return;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        std::string s = format_double(x);
        // keep it a float on re-read
        if (s.find_first_of(".eEn") == std::string::npos) {
            s += ".0";
        }
        out += s;
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump(const Json& j)
{
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

Json tau_json(const sae::SAEParameter& tau)
{
    Json j;
    j["tau"] = number(tau.tau());
    j["theta"] = tau.theta();
    return j;
}

Json config_json(const RunConfig& c)
{
    Json j;
    j["command"] = to_string(c.command);
    Json p;
    p["m"] = c.m;
    p["l"] = c.l;
    p["v0"] = c.v0;
    p["coulomb"] = c.coulomb;
    p["tail"] = c.tail;
    j["problem"] = p;
    if (c.theta) {
        j["theta"] = *c.theta;
    } else if (c.tau) {
        j["tau"] = *c.tau;
    }
    j["count"] = c.count;
    j["tolerance"] = c.tolerance;
    j["points_per_decade"] = c.points_per_decade;
    if (c.command == Command::spectrum || c.command == Command::oracle_verify) {
        j["fall_c"] = c.fall_c;
        j["fall_n_lo"] = c.fall_n_lo;
    }
    if (c.command == Command::sweep) {
        Json s;
        s["parameter"] = c.sweep.parameter;
        s["min"] = c.sweep.min;
        s["max"] = c.sweep.max;
        s["points"] = c.sweep.count;
        s["scale"] = c.sweep.geometric ? "geometric" : "linear";
        j["sweep"] = s;
    }
    if (c.command == Command::specfun_eval) {
        j["function"] = c.function;
        j["args"] = c.args;
    }
    if (!c.report.empty()) {
        j["report"] = c.report;
    }
    return j;
}

Json analysis_json(const sae::RadialProblem& problem)
{
    const sae::SingularityAnalysis a = sae::analyze(problem);
    Json j;
    j["regime"] = std::string(sae::to_string(a.regime));
    j["gamma"] = a.gamma;
    j["p_squared"] = a.p_squared;
    j["p"] = a.p ? Json(*a.p) : Json(nullptr);
    j["imag_p"] = a.imag_p ? Json(*a.imag_p) : Json(nullptr);
    switch (a.exponent_kind) {
    case sae::ExponentKind::power_pair:
        j["exponents"] = Json::array({a.exponents[0], a.exponents[1]});
        break;
    case sae::ExponentKind::log_pair:
        j["exponents"] = "log_pair";
        break;
    case sae::ExponentKind::oscillatory_pair:
        j["exponents"] = "oscillatory_pair";
        break;
    }
    j["additional_exists"] = sae::additional_exists(problem);
    j["anti_centrifugal"] = a.anti_centrifugal;

    Json kinetic;
    for (auto b : {sae::SolutionBranch::standard, sae::SolutionBranch::additional, sae::SolutionBranch::oscillatory}) {
        try {
            kinetic[std::string(sae::to_string(b))] = std::string(sae::to_string(sae::kinetic_convergence(a, b)));
        } catch (const sae::Error&) {
            // branch absent in this regime
        }
    }
    j["kinetic_energy"] = kinetic;

    if (problem.coulomb < 0.0) {
        const sae::QuantumDefect q = sae::quantum_defect(problem);
        Json d;
        d["delta_l"] = q.delta_l;
        d["exact_defect"] = number(q.exact_defect);
        d["expansion_valid"] = q.expansion_valid;
        d["additional_possible"] = q.additional_possible;
        d["consistent"] = q.consistent;
        j["quantum_defect"] = d;
    }
    return j;
}

Json spectrum_json(const sae::SpectrumResult& s)
{
    Json j;
    j["tau"] = tau_json(s.tau);
    Json states = Json::array();
    for (const sae::BoundState& b : s.states) {
        Json st;
        st["n_r"] = b.n_r;
        st["energy"] = b.energy;
        st["branch"] = std::string(sae::to_string(b.branch));
        st["source"] = std::string(sae::to_string(b.source));
        st["lambda"] = b.lambda ? Json(*b.lambda) : Json(nullptr);
        if (b.node_count) {
            st["node_count"] = *b.node_count;
        }
        states.push_back(st);
    }
    j["states"] = states;
    Json meta = Json::object();
    for (const auto& [k, v] : s.metadata) {
        meta[k] = number(v);
    }
    j["metadata"] = meta;
    return j;
}

} // namespace saespec
