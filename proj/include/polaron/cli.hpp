// cli.hpp - Command-line front end: configuration model and subcommands

#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "polaron/optical_bath.hpp"
#include "polaron/prf.hpp"
#include "polaron/spectral_density.hpp"

namespace polaron::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalFailure = 3,
    kPartialSweepFailure = 4,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Engine { TruncationZeroT, TruncationInfiniteT, Oracle, Weak, Flat };

std::string engine_name(Engine e);  // CSV "engine" column value

struct VibrationalSettings {
    std::string family{"cubic_exponential"};
    std::optional<double> huang_rhys;
    std::optional<double> reorganisation;
    double cutoff{0.2};
    std::vector<DiscreteMode> modes;
    std::vector<double> frequency;  // tabulated
    std::vector<double> value;
};

struct SweepSettings {
    std::string parameter;  // S, omega_c, T_V, lambda, T_O, delta_prime
    double start{0.0};
    double stop{0.0};
    int count{0};
    bool log_scale{false};
};

struct DynamicsSettings {
    double initial_excited{0.0};
    std::optional<double> end_time;  // 1/eV; default five relaxation times
    int samples{101};
};

struct Settings {
    VibrationalSettings vibrational;
    std::string optical_family{"cubic"};
    double optical_scale{1.0};
    double vibrational_temperature{0.0};
    double optical_temperature{6000.0};
    SystemEnergy energy{SystemEnergy::polaron(1.0)};
    std::vector<int> nstar{1};
    std::vector<Engine> engines{Engine::TruncationZeroT};
    double tolerance{1e-10};
    SweepSettings sweep;
    DynamicsSettings dynamics;
    int jobs{1};
};

// Validates and converts a JSON configuration. Throws ConfigError.
Settings parse_settings(const nlohmann::json& config);

SpectralDensity make_density(const VibrationalSettings& v);
OpticalBath make_optical_bath(const Settings& s);

// Sets one sweepable parameter. Throws ConfigError for unknown names.
void apply_parameter(Settings& s, const std::string& name, double value);

std::vector<double> sweep_grid(const SweepSettings& sweep);

struct EngineOutcome {
    Engine engine{Engine::TruncationZeroT};
    int nstar{0};  // 0 for engines without a truncation
    std::optional<RateResult> result;
    std::string error;
};

// Every configured engine at one parameter point, truncations expanded over
// the N* list. Failures are captured per engine.
std::vector<EngineOutcome> evaluate_point(const Settings& s);

// polaron-rates entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polaron::cli
