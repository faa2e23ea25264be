// scenario.hpp - config-driven runs: build the model, map it, evolve the
// kicked collective coordinate, compute spectra and write data files.
//
// Config files are line oriented:
//
//   # comment
//   [model]
//   kind = next_neighbor
//   N = 32
//   alpha = 0.5
//
// Sections: model, dynamics, spectra, output. Unknown sections or keys are
// errors.

#pragma once

#include "collective/model.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace collective {

// Malformed or out-of-range configuration; the message names the line or
// field at fault.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    std::string kind = "next_neighbor";  // next_neighbor | general
    int n_particles = 0;
    double mass = 1.0;
    double omega0 = 1.0;
    double alpha = 0.0;
    double hbar = 1.0;
    double constant_k = 0.0;  // added to every K_ij
    std::filesystem::path w_file;  // general only
    std::filesystem::path k_file;  // optional for next_neighbor: replaces the point coupling
};

struct DynamicsConfig {
    double p0 = 1.0;
    std::optional<double> t_max;      // default min(20 / gamma0, recurrence / 2)
    std::optional<std::size_t> steps; // default t_max / (0.02 / max frequency)
};

struct SpectraConfig {
    std::optional<double> epsilon;    // default 5 * mean spacing of the strength comb
    std::optional<double> omega_max;  // default 1.5 * top collective frequency
    std::size_t points = 2000;
    std::vector<int> powers{1, 2};
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    bool csv = true;
    bool json = true;
};

struct ScenarioConfig {
    ModelConfig model;
    DynamicsConfig dynamics;
    SpectraConfig spectra;
    OutputConfig output;
};

// Relative matrix paths are resolved against base_dir.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

// Whitespace-separated square matrix, one row per line.
Matrix read_matrix_file(const std::filesystem::path& path);

SystemModel build_scenario_model(const ModelConfig& config);

// Writes trajectory.csv, sigma.csv, strengths.csv and spectrum.csv (csv
// format) and summary.json (json format) into `directory`, which is created
// if needed. Returns the summary. Numerical failures propagate as
// InvalidInput / NumericalError.
nlohmann::ordered_json run_scenario(const ScenarioConfig& config,
                                    const std::filesystem::path& directory);

struct CheckResult {
    std::string group;
    std::string name;
    double value;
    double tolerance;
    bool passed;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_passed() const noexcept;
    nlohmann::ordered_json to_json() const;
};

// Runs the invariant suites of every module against the configured model.
// The Volterra comparison ignores the step limit so a coarse step shows up
// as a failed check rather than an error.
VerifyReport verify_scenario(const ScenarioConfig& config);

struct Figure1Result {
    std::filesystem::path s1_file;
    std::filesystem::path s2_file;
    double s1_peak;
    double s2_peak;
};

// Scaled Ohmic S and S^(2) at Omega_bar = 1, gamma_bar = 0.1, hbar = m = 1 on
// [0, 4] with 2000 points: (pi m Wb^2 / hbar) S and
// (pi^2 m^2 Wb^3 / 2 hbar^2) S^(2).
Figure1Result write_figure1(const std::filesystem::path& directory);

// "%.17g"
std::string format_number(double value);

} // namespace collective
