#include "saespec/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

std::filesystem::path output_path(const std::string& name)
{
    std::filesystem::path p(name);
    const char* dir = std::getenv("SAESPEC_OUTPUT_DIR");
    if (p.is_relative() && dir && *dir) {
        p = std::filesystem::path(dir) / p;
    }
    return p;
}

} // namespace

int main(int argc, char** argv)
{
    using saespec::Command;
    saespec::RunConfig cfg;

    CLI::App app{"saespec: bound states of inverse-square singular radial problems"};
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);

    app.add_option("--m", cfg.m, "mass")->check(CLI::PositiveNumber);
    app.add_option("--l", cfg.l, "orbital quantum number")->check(CLI::NonNegativeNumber);
    app.add_option("--v0", cfg.v0, "strength of -v0/r^2");
    app.add_option("--coulomb", cfg.coulomb, "strength of +coulomb/r (negative attracts)");
    app.add_option("--tail", cfg.tail, "regular tail: harmonic:<g> or sinh2:<a>");
    auto* tau = app.add_option("--tau", cfg.tau, "extension parameter a_add/a_st, or inf");
    app.add_option("--theta", cfg.theta, "extension angle, tau = tan(theta)")->excludes(tau);
    app.add_option("--count", cfg.count, "number of levels");
    app.add_option("--fall-c", cfg.fall_c, "phase constant of the fall tower");
    app.add_option("--fall-n", cfg.fall_n_lo, "first tower index");
    app.add_option("--format", cfg.format, "json or csv (sweep only)")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output,-o", cfg.output, "write the report here (relative to $SAESPEC_OUTPUT_DIR if set)");
    app.add_option("--tolerance", cfg.tolerance, "relative tolerance of oracle-verify");
    app.add_option("--ppd", cfg.points_per_decade, "oracle mesh points per decade");
    app.add_option("--jobs", cfg.jobs, "sweep worker threads (0: all cores)");

    std::string scale = "linear";
    auto* classify = app.add_subcommand("classify", "singularity analysis and regime")->fallthrough();
    auto* spectrum = app.add_subcommand("spectrum", "bound-state spectrum")->fallthrough();
    auto* verify = app.add_subcommand("oracle-verify", "recompute levels by shooting")->fallthrough();
    verify->add_option("--report", cfg.report, "JSON report to verify instead of the flags");
    auto* sweep = app.add_subcommand("sweep", "spectrum over a parameter grid")->fallthrough();
    sweep->add_option("--param", cfg.sweep.parameter, "tau, theta, v0, coulomb or m");
    sweep->add_option("--min", cfg.sweep.min)->required();
    sweep->add_option("--max", cfg.sweep.max)->required();
    sweep->add_option("--points", cfg.sweep.count, "grid size")->required();
    sweep->add_option("--scale", scale)->check(CLI::IsMember({"linear", "geometric"}));
    auto* eval = app.add_subcommand("specfun-eval", "evaluate one special function")->fallthrough();
    eval->add_option("--function", cfg.function)->required();
    eval->add_option("--args", cfg.args)->delimiter(',');

    // debugging alias: saespec specfun eval <name> <args...>
    auto* specfun = app.add_subcommand("specfun")->group("");
    specfun->require_subcommand(1);
    auto* specfun_eval = specfun->add_subcommand("eval", "evaluate one special function");
    specfun_eval->add_option("name", cfg.function)->required();
    specfun_eval->add_option("args", cfg.args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? saespec::kExitOk : saespec::kExitUsage;
    }

    cfg.sweep.geometric = scale == "geometric";
    if (classify->parsed()) {
        cfg.command = Command::classify;
    } else if (spectrum->parsed()) {
        cfg.command = Command::spectrum;
    } else if (verify->parsed()) {
        cfg.command = Command::oracle_verify;
    } else if (sweep->parsed()) {
        cfg.command = Command::sweep;
    } else {
        cfg.command = Command::specfun_eval;
    }

    const saespec::Outcome out = saespec::run(cfg);
    for (const std::string& m : out.messages) {
        std::cerr << "saespec: " << m << '\n';
    }
    if (!out.text.empty()) {
        if (cfg.output.empty()) {
            std::cout << out.text;
        } else {
            const std::filesystem::path path = output_path(cfg.output);
            std::ofstream file(path);
            if (!file) {
                std::cerr << "saespec: cannot write " << path << '\n';
                return saespec::kExitUsage;
            }
            file << out.text;
        }
    }
    return out.exit_code;
}
