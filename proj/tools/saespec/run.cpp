#include "saespec/run.hpp"

#include "sae/errors.hpp"
#include "sae/oracle.hpp"
#include "sae/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace saespec {

namespace {

sae::oracle::MeshSpec mesh_of(const RunConfig& c)
{
    sae::oracle::MeshSpec mesh;
    mesh.points_per_decade = c.points_per_decade;
    return mesh;
}

Json base_report(const RunConfig& config)
{
    Json j;
    j["config"] = config_json(config);
    return j;
}

struct SpecfunEntry {
    std::size_t arity;
    double (*fn)(const std::vector<double>&);
};

const std::map<std::string, SpecfunEntry>& specfun_table()
{
    namespace sf = sae::specfun;
    static const std::map<std::string, SpecfunEntry> table = {
        {"gamma", {1, [](const std::vector<double>& a) { return sf::gamma(a[0]); }}},
        {"log_gamma", {1, [](const std::vector<double>& a) { return sf::log_gamma(a[0]).log_magnitude; }}},
        {"gamma_ratio", {2, [](const std::vector<double>& a) { return sf::gamma_ratio(a[0], a[1]); }}},
        {"digamma", {1, [](const std::vector<double>& a) { return sf::digamma(a[0]); }}},
        {"kummer_m", {3, [](const std::vector<double>& a) { return sf::kummer_m(a[0], a[1], a[2]); }}},
        {"tricomi_u", {3, [](const std::vector<double>& a) { return sf::tricomi_u(a[0], a[1], a[2]); }}},
        {"whittaker_w", {3, [](const std::vector<double>& a) { return sf::whittaker_w(a[0], a[1], a[2]); }}},
        {"bessel_i", {2, [](const std::vector<double>& a) { return sf::bessel_i(a[0], a[1]); }}},
        {"bessel_k", {2, [](const std::vector<double>& a) { return sf::bessel_k(a[0], a[1]); }}},
        {"fp_lambda", {2, [](const std::vector<double>& a) { return sae::fp_lambda(a[0], a[1]); }}},
        {"scarf_b", {3, [](const std::vector<double>& a) { return sae::scarf_b(a[0], a[1], a[2]); }}},
    };
    return table;
}

Outcome classify(const RunConfig& config)
{
    const sae::RadialProblem problem = problem_of(config);
    Json j = base_report(config);
    j["analysis"] = analysis_json(problem);
    j["diagnostics"] = Json::array();
    return {kExitOk, dump(j), {}};
}

Outcome spectrum(const RunConfig& config)
{
    const sae::RadialProblem problem = problem_of(config);
    const sae::SpectrumResult s = compute_spectrum(config);
    Json j = base_report(config);
    j["analysis"] = analysis_json(problem);
    j["spectrum"] = spectrum_json(s);
    j["diagnostics"] = s.diagnostics;
    return {kExitOk, dump(j), {}};
}

struct Target {
    int n_r = 0;
    double energy = 0.0;
    std::string branch;
};

struct Verdict {
    Json level;
    bool pass = false;
};

Verdict verify_level(const sae::RadialProblem& problem, const sae::SAEParameter& tau, const Target& t,
                     const RunConfig& config, std::vector<std::string>& diagnostics)
{
    if (t.branch == "fall_tower") {
        throw sae::RegimeError("the oracle does not integrate the FALL_TO_CENTER regime");
    }
    const double e = t.energy;
    const double width = 1e-2 * std::abs(e);
    const sae::SpectrumResult found =
        sae::oracle::find_levels(problem, tau, {e - width, e + width}, 4, mesh_of(config));
    Verdict v;
    v.level["n_r"] = t.n_r;
    v.level["expected"] = e;
    const sae::BoundState* best = nullptr;
    for (const sae::BoundState& s : found.states) {
        if (!best || std::abs(s.energy - e) < std::abs(best->energy - e)) {
            best = &s;
        }
    }
    if (!best) {
        v.level["oracle"] = nullptr;
        v.level["relative_deviation"] = nullptr;
        v.level["node_count"] = nullptr;
        v.level["pass"] = false;
        diagnostics.push_back("level " + std::to_string(t.n_r) + ": no oracle level within 1% of " +
                              format_double(e));
        return v;
    }
    const double dev = std::abs(best->energy / e - 1.0);
    const int nodes = best->node_count.value_or(best->n_r);
    v.pass = dev <= config.tolerance && nodes == t.n_r;
    v.level["oracle"] = best->energy;
    v.level["relative_deviation"] = dev;
    v.level["node_count"] = nodes;
    v.level["pass"] = v.pass;
    if (nodes != t.n_r) {
        diagnostics.push_back("level " + std::to_string(t.n_r) + ": oracle eigenfunction has " +
                              std::to_string(nodes) + " nodes");
    }
    return v;
}

// Rebuilds the run configuration stored in a JSON report.
RunConfig config_from_report(const Json& report, const RunConfig& outer)
{
    const Json& c = report.at("config");
    const Json& p = c.at("problem");
    RunConfig rc = outer;
    rc.m = p.at("m").get<double>();
    rc.l = p.at("l").get<int>();
    rc.v0 = p.at("v0").get<double>();
    rc.coulomb = p.at("coulomb").get<double>();
    rc.tail = p.value("tail", std::string());
    rc.tau.reset();
    rc.theta.reset();
    if (c.contains("theta")) {
        rc.theta = c["theta"].get<double>();
    } else if (c.contains("tau")) {
        rc.tau = c["tau"].get<std::string>();
    }
    rc.count = c.value("count", rc.count);
    rc.tolerance = c.value("tolerance", rc.tolerance);
    rc.points_per_decade = c.value("points_per_decade", rc.points_per_decade);
    rc.fall_c = c.value("fall_c", rc.fall_c);
    rc.fall_n_lo = c.value("fall_n_lo", rc.fall_n_lo);
    return rc;
}

Outcome oracle_verify(const RunConfig& outer)
{
    RunConfig config = outer;
    Json previous;
    std::vector<Target> targets;
    if (!outer.report.empty()) {
        std::ifstream in(outer.report);
        if (!in) {
            throw std::invalid_argument("cannot open report '" + outer.report + "'");
        }
        try {
            previous = Json::parse(in);
            config = config_from_report(previous, outer);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("malformed report '" + outer.report + "': " + e.what());
        }
        config.command = Command::oracle_verify;
        config.report = outer.report;
        if (previous.contains("spectrum")) {
            for (const Json& s : previous["spectrum"].at("states")) {
                targets.push_back({s.at("n_r").get<int>(), s.at("energy").get<double>(),
                                   s.at("branch").get<std::string>()});
            }
        }
    }
    const sae::RadialProblem problem = problem_of(config);
    const sae::SAEParameter tau = tau_of(config);
    sae::SpectrumResult s;
    if (outer.report.empty() || !previous.contains("spectrum")) {
        s = compute_spectrum(config);
        for (const sae::BoundState& b : s.states) {
            targets.push_back({b.n_r, b.energy, std::string(sae::to_string(b.branch))});
        }
    }

    std::vector<std::string> diagnostics = s.diagnostics;
    Json levels = Json::array();
    bool all_pass = true;
    for (const Target& t : targets) {
        Verdict v = verify_level(problem, tau, t, config, diagnostics);
        all_pass = all_pass && v.pass;
        levels.push_back(v.level);
    }
    if (targets.empty()) {
        diagnostics.push_back("no levels to verify");
    }

    Json j = base_report(config);
    j["analysis"] = analysis_json(problem);
    if (!s.states.empty() || previous.contains("spectrum")) {
        j["spectrum"] = previous.contains("spectrum") ? previous["spectrum"] : spectrum_json(s);
    }
    Json ver;
    ver["tolerance"] = config.tolerance;
    ver["levels"] = levels;
    ver["all_pass"] = all_pass;
    if (previous.contains("verification")) {
        const Json& old = previous["verification"].at("levels");
        bool same = old.size() == levels.size();
        for (std::size_t i = 0; same && i < old.size(); ++i) {
            same = old[i].at("pass") == levels[i].at("pass");
        }
        ver["verdicts_reproduced"] = same;
        if (!same) {
            diagnostics.push_back("verdicts differ from the ingested report");
        }
    }
    j["verification"] = ver;
    j["diagnostics"] = diagnostics;
    Outcome out{all_pass ? kExitOk : kExitVerification, dump(j), {}};
    if (!all_pass) {
        out.messages.push_back("verification failed: deviation above " + format_double(config.tolerance));
    }
    return out;
}

struct SweepPoint {
    double value = 0.0;
    std::vector<double> energies;
    std::vector<double> lambdas;
    std::string error;
};

SweepPoint sweep_point(RunConfig config, double value)
{
    SweepPoint pt;
    pt.value = value;
    const std::string& name = config.sweep.parameter;
    if (name == "tau") {
        config.tau = format_double(value);
        config.theta.reset();
    } else if (name == "theta") {
        config.theta = value;
        config.tau.reset();
    } else if (name == "v0") {
        config.v0 = value;
    } else if (name == "coulomb") {
        config.coulomb = value;
    } else if (name == "m") {
        config.m = value;
    }
    try {
        const sae::SpectrumResult s = compute_spectrum(config);
        for (const sae::BoundState& b : s.states) {
            pt.energies.push_back(b.energy);
            pt.lambdas.push_back(b.lambda ? *b.lambda : std::nan(""));
        }
    } catch (const sae::Error& e) {
        pt.error = e.what();
    }
    return pt;
}

Outcome sweep(const RunConfig& config)
{
    const std::vector<double> grid = sweep_grid(config.sweep);
    // validate the fixed part up front so usage problems are not per point
    problem_of(config);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t jobs = config.jobs > 0 ? static_cast<std::size_t>(config.jobs) : hw;
    std::vector<SweepPoint> points(grid.size());
    for (std::size_t start = 0; start < grid.size(); start += jobs) {
        const std::size_t stop = std::min(grid.size(), start + jobs);
        std::vector<std::future<SweepPoint>> batch;
        for (std::size_t i = start; i < stop; ++i) {
            batch.push_back(std::async(std::launch::async, sweep_point, config, grid[i]));
        }
        for (std::size_t i = start; i < stop; ++i) {
            points[i] = batch[i - start].get();
        }
    }

    Outcome out;
    const std::string& name = config.sweep.parameter;
    const std::size_t width = static_cast<std::size_t>(config.count);
    if (config.format == "csv") {
        std::ostringstream os;
        os << name;
        for (std::size_t k = 0; k < width; ++k) {
            os << ",energy_" << k;
        }
        for (std::size_t k = 0; k < width; ++k) {
            os << ",lambda_" << k;
        }
        os << ",error\n";
        for (const SweepPoint& p : points) {
            os << format_double(p.value);
            for (std::size_t k = 0; k < width; ++k) {
                os << ',';
                if (k < p.energies.size()) {
                    os << format_double(p.energies[k]);
                }
            }
            for (std::size_t k = 0; k < width; ++k) {
                os << ',';
                if (k < p.lambdas.size() && !std::isnan(p.lambdas[k])) {
                    os << format_double(p.lambdas[k]);
                }
            }
            os << ',' << p.error << '\n';
        }
        out.text = os.str();
        return out;
    }
    Json j = base_report(config);
    j["analysis"] = analysis_json(problem_of(config));
    Json records = Json::array();
    for (const SweepPoint& p : points) {
        Json r;
        r[name] = p.value;
        Json e = Json::array();
        for (double x : p.energies) {
            e.push_back(x);
        }
        Json lam = Json::array();
        for (double x : p.lambdas) {
            lam.push_back(std::isnan(x) ? Json(nullptr) : Json(x));
        }
        r["energies"] = e;
        r["lambdas"] = lam;
        if (!p.error.empty()) {
            r["error"] = p.error;
        }
        records.push_back(r);
    }
    j["sweep"] = records;
    j["diagnostics"] = Json::array();
    out.text = dump(j);
    return out;
}

Outcome specfun_eval(const RunConfig& config)
{
    Json j = base_report(config);
    j["value"] = eval_specfun(config.function, config.args);
    j["diagnostics"] = Json::array();
    return {kExitOk, dump(j), {}};
}

} // namespace

std::vector<std::string> specfun_names()
{
    std::vector<std::string> names;
    for (const auto& [name, entry] : specfun_table()) {
        names.push_back(name);
    }
    return names;
}

double eval_specfun(const std::string& name, const std::vector<double>& args)
{
    const auto& table = specfun_table();
    const auto it = table.find(name);
    if (it == table.end()) {
        throw std::invalid_argument("unknown function '" + name + "'");
    }
    if (args.size() != it->second.arity) {
        throw std::invalid_argument(name + " takes " + std::to_string(it->second.arity) + " argument(s)");
    }
    return it->second.fn(args);
}

sae::SpectrumResult compute_spectrum(const RunConfig& config)
{
    const sae::RadialProblem problem = problem_of(config);
    const sae::SAEParameter tau = tau_of(config);
    const sae::SingularityAnalysis a = sae::analyze(problem);

    if (a.regime == sae::Regime::fall_to_center) {
        if (problem.coulomb != 0.0 || problem.tail) {
            throw sae::RegimeError("the fall tower is only available for a pure inverse-square potential");
        }
        return sae::fall_spectrum(problem, config.fall_c, config.fall_n_lo, config.fall_n_lo + config.count - 1);
    }
    if (problem.tail || a.regime == sae::Regime::log_case) {
        return sae::oracle::find_lowest_levels(problem, tau, config.count, mesh_of(config));
    }
    if (problem.coulomb < 0.0) {
        if (a.regime == sae::Regime::standard_only) {
            if (!tau.is_standard()) {
                throw sae::RegimeError("only tau = 0 is admissible for P >= 1/2");
            }
            return sae::closed_levels(problem, sae::Branch::standard, config.count - 1);
        }
        return sae::solve_attractive_coulomb(problem, tau, config.count);
    }
    if (problem.coulomb > 0.0) {
        if (a.regime == sae::Regime::standard_only) {
            if (!tau.is_standard()) {
                throw sae::RegimeError("only tau = 0 is admissible for P >= 1/2");
            }
            sae::SpectrumResult s;
            s.problem = problem;
            s.tau = tau;
            s.diagnostics.push_back("no bound states: repulsive potential with the standard branch only");
            return s;
        }
        return sae::solve_repulsive_coulomb(problem, tau, config.count);
    }
    sae::SpectrumResult s;
    s.problem = problem;
    s.tau = tau;
    if (a.regime == sae::Regime::standard_only) {
        if (!tau.is_standard()) {
            throw sae::RegimeError("only tau = 0 is admissible for P >= 1/2");
        }
        s.diagnostics.push_back("no bound states: inverse-square potential with the standard branch only");
        return s;
    }
    if (const auto level = sae::inverse_square_level(problem, tau)) {
        s.states.push_back(*level);
    } else {
        s.diagnostics.push_back("no level for tau = 0 or tau = inf");
    }
    return s;
}

Outcome run(const RunConfig& config)
{
    try {
        check(config);
        switch (config.command) {
        case Command::classify: return classify(config);
        case Command::spectrum: return spectrum(config);
        case Command::oracle_verify: return oracle_verify(config);
        case Command::sweep: return sweep(config);
        case Command::specfun_eval: return specfun_eval(config);
        }
        return {kExitUsage, "", {"no command"}};
    } catch (const std::invalid_argument& e) {
        return {kExitUsage, "", {e.what()}};
    } catch (const sae::Error& e) {
        return {kExitRegime, "", {e.what()}};
    }
}

} // namespace saespec
