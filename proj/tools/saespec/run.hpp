#pragma once

#include "saespec/config.hpp"
#include "saespec/report.hpp"

#include "sae/spectra.hpp"

#include <string>
#include <vector>

namespace saespec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRegime = 2;
inline constexpr int kExitVerification = 3;

struct Outcome {
    int exit_code = kExitOk;
    std::string text;                  // report for stdout or --output
    std::vector<std::string> messages; // for stderr
};

/// Runs one command. Never throws for library or usage errors; those map to
/// exit codes 2 and 1.
Outcome run(const RunConfig& config);

/// Spectrum of the configured problem with the solver the regime calls for:
/// closed forms and transcendental roots where available, the shooting oracle
/// for problems with a tail or P = 0.
sae::SpectrumResult compute_spectrum(const RunConfig& config);

/// Value of one special function, by name.
double eval_specfun(const std::string& name, const std::vector<double>& args);

/// Names accepted by eval_specfun.
std::vector<std::string> specfun_names();

} // namespace saespec
