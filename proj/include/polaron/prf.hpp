// prf.hpp - Polaron rate function of a truncated bath and the derived rates
//
// For N modes the vibrational kernel is a comb of lines at offsets
// eps_L = sum_i l_i w_i with weights prod_i A_{l_i}(S_i, w_i), and
//
//   gamma(eta) = sum_L weight_L [J_E(eta - eps_L) + J_A(eps_L - eta)].
//
// Excitation and decay rates are gamma(-delta') and gamma(delta').

#pragma once

#include <span>
#include <string>
#include <vector>

#include "polaron/amplitude.hpp"
#include "polaron/moment_matching.hpp"
#include "polaron/optical_bath.hpp"
#include "polaron/spectral_density.hpp"

namespace polaron {

struct SidebandLine {
    double offset;  // eV
    double weight;
};

struct SidebandOptions {
    AmplitudeOptions amplitude{};
    double pruning_threshold{1e-12};  // relative to the largest weight after each fold
    double merge_tolerance{1e-12};    // eV
    std::size_t max_lines{1u << 24};  // TruncationFailure beyond this many comb lines
};

struct SidebandSpectrum {
    std::vector<SidebandLine> lines;  // ascending offset
    double pruning_threshold{0.0};
    double mass_deficit{0.0};  // 1 - sum of weights
    int series_terms{0};       // largest amplitude series order used
};

SidebandSpectrum sideband_spectrum(const TruncatedBath& bath, double vibrational_temperature,
                                   const SidebandOptions& opts = {});

struct RateComponents {
    double total{0.0};
    double emission{0.0};    // J_E terms
    double absorption{0.0};  // J_A terms
};

// gamma(eta) split by photon channel. A flat optical bath uses the flat
// convention: J_E(eta) and J_A(-eta) for every line.
RateComponents polaron_rate(double eta, const SidebandSpectrum& spectrum, const OpticalBath& ob);

double prf(double eta, const TruncatedBath& bath, const OpticalBath& ob, double vibrational_temperature,
           const SidebandOptions& opts = {});

// Electronic splitting given either bare (delta) or polaron-shifted (delta' = delta - lambda).
struct SystemEnergy {
    enum class Kind { Bare, Polaron };
    Kind kind{Kind::Polaron};
    double value{1.0};

    static SystemEnergy bare(double delta) { return {Kind::Bare, delta}; }
    static SystemEnergy polaron(double delta_prime) { return {Kind::Polaron, delta_prime}; }
};

struct RateOptions {
    int n_modes{1};
    Expansion expansion{Expansion::ZeroTemperature};
    SidebandOptions sideband{};
    MomentOptions moments{};
};

struct RateResult {
    RateComponents up;    // excitation, gamma(-delta')
    RateComponents down;  // decay, gamma(delta')
    double polaron_energy{0.0};
    TruncatedBath bath;
    double mass_deficit{0.0};
    int series_terms{0};
    std::vector<std::string> warnings;
};

RateResult rates(SystemEnergy energy, const SpectralDensity& sd, const OpticalBath& ob,
                 double vibrational_temperature, const RateOptions& opts = {});

// Rates for an already truncated bath at polaron energy delta'.
RateResult rates(double polaron_energy, const TruncatedBath& bath, const OpticalBath& ob,
                 double vibrational_temperature, const SidebandOptions& opts = {});

struct ConvergedRates {
    RateResult result;    // at the last N* evaluated
    int n_modes{0};
    double change{0.0};   // max relative change of gamma_up, gamma_down against N* - 1
    bool converged{false};
};

// Raises N* from opts.n_modes until both rates move by less than tolerance
// (relative) between successive N*, or kMaxModes is reached. A comb that
// outgrows its line limit stops the loop unconverged.
ConvergedRates converged_rates(SystemEnergy energy, const SpectralDensity& sd, const OpticalBath& ob,
                               double vibrational_temperature, double tolerance, RateOptions opts = {});

// gamma_up = J_E(-delta) + J_A(delta), gamma_down = J_E(delta) + J_A(-delta).
RateResult weak_limit_rates(double delta, const OpticalBath& ob);

// The same expressions evaluated at delta'.
RateResult flat_limit_rates(double polaron_energy, const OpticalBath& ob);

// rho_ss = gamma_up / (gamma_up + gamma_down). Throws DegenerateRates.
double steady_state(const RateResult& r);

// rho_ee(t) = rho_ss + (rho_ee(0) - rho_ss) exp(-(gamma_up + gamma_down) t).
std::vector<double> population_dynamics(const RateResult& r, double initial_excited, std::span<const double> times);

}  // namespace polaron
