// units.hpp - Physical constants and thermal occupation helpers
//
// Energies are in eV with hbar = 1, so rates carry units of energy and times
// units of 1/eV. Temperatures are in Kelvin.

#pragma once

#include <cmath>
#include <numbers>

namespace polaron {

inline constexpr double kBoltzmann = 8.617333262e-5;  // eV / K
inline constexpr double kPi = std::numbers::pi;

inline double thermal_energy(double temperature) noexcept { return kBoltzmann * temperature; }

// Bose-Einstein occupation 1/(exp(E/kT) - 1). Zero temperature and
// non-positive energies give exactly 0.
inline double bose_occupation(double energy, double temperature) noexcept {
    if (!(temperature > 0.0) || !(energy > 0.0)) return 0.0;
    return 1.0 / std::expm1(energy / thermal_energy(temperature));
}

}  // namespace polaron
