#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mixtopo/invariants.hpp"

namespace mixtopo::cli {

inline const std::vector<std::string> kExperiments = {"chern",        "uhlmann-wind", "uhlmann-chern", "phase-profile",
                                                      "beta-scan",    "gap-scan",     "band-sum",      "repro"};

// One experiment invocation. Config files use the flag names as keys:
//
//     experiment = phase-profile
//     beta = 1.3
//     axis = x
//     loop-points = 500
struct ExperimentConfig {
    std::string model = "builtin";
    std::string experiment;
    std::optional<double> beta;
    std::optional<std::pair<double, double>> beta_bracket;
    std::optional<std::pair<int, int>> grid;
    int loop_points = 500;
    int slow_count = 500;
    std::string axis = "x";
    double footpoint = -kPi;
    int subspace = 1;
    double min_gap = 1e-6;
    std::optional<double> floor;
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct Diagnostic {
    std::string field;
    std::string message;
};

// Config rejected by validate(); carries every diagnostic.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string to_config_text(const ExperimentConfig& c);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Empty iff run() would accept the config.
std::vector<Diagnostic> validate(const ExperimentConfig& c);

struct ResultEnvelope {
    ExperimentConfig config;
    std::vector<InvariantReport> reports;
    std::vector<PhaseProfile> profiles;
    double wall_time_s = 0.0;
    std::string version;
    std::vector<std::string> warnings;
    // Nonzero when the run produced output but a guard fired (partial profile).
    int status = 0;
};

// Throws ConfigError for invalid configs and mixtopo::Error subclasses for
// numerical failures.
ResultEnvelope run(const ExperimentConfig& c);

// Report table: name,value,raw,tolerance,nx,ny,loop_points,slow_count,kx,ky
std::string reports_csv(const std::vector<InvariantReport>& reports);
// Phase profile: k,phi_u
std::string profile_csv(const PhaseProfile& p);
nlohmann::json to_json(const InvariantReport& r);
nlohmann::json to_json(const PhaseProfile& p);
// Deterministic part only when include_timing is false.
nlohmann::json to_json(const ResultEnvelope& e, bool include_timing = true);

// Main output in the configured format, plus per-axis profile CSVs for repro.
std::string render(const ResultEnvelope& e);
void write_outputs(const ResultEnvelope& e);

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kSpectralConstraint = 3,
    kUnderResolved = 4,
    kNoTransition = 5,
};

int exit_code_for(const std::exception& e);

std::string version();

}  // namespace mixtopo::cli
