#pragma once

// Command-line front end. Subcommands: spectrum | ratios | stability | fit |
// sweep | tune | verify, each driven by a JSON config (see README for the
// schema). Exit codes: 0 success, 1 verification failure, 2 configuration
// error, 3 computation error.

#include "optoamp/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace optoamp::cli {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct GridSpec1D {
    double lo = 0.0, hi = 0.0;
    std::size_t points = 0;
};

struct SpectrumConfig {
    GridSpec1D omega;
};

struct FitConfig {
    std::optional<double> bracket_lo, bracket_hi;
};

struct StabilityConfig {
    GridSpec1D gamma;
    GridSpec1D g;
};

struct SweepConfig {
    std::string x_param, y_param;
    GridSpec1D x, y;
    std::string metric;
    std::vector<double> contour_levels;
};

struct TuneConfig {
    GridSpec1D j;
};

struct VerifyConfig {
    std::vector<double> omegas;
    double amplitude = 1.0;
    double settle    = 60.0;
    double measure   = 150.0;
    double dt        = 0.05;
};

struct RunConfig {
    SystemParams params;
    double delta = 1e-4;
    double n_eff = 0.0;
    std::optional<SpectrumConfig> spectrum;
    std::optional<FitConfig> fit;
    std::optional<StabilityConfig> stability;
    std::optional<SweepConfig> sweep;
    std::optional<TuneConfig> tune;
    std::optional<VerifyConfig> verify;
};

// Parses and validates a config file. Unknown keys are rejected at every
// level; params invariants are enforced here. Throws ConfigError.
RunConfig load_config(const std::string& path);

// Full dispatch; returns the process exit code.
int run(int argc, const char* const* argv);

} // namespace optoamp::cli
