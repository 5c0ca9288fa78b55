// optical_bath.hpp - Photon bath J_O(nu) at temperature T_O
//
// J_E(nu) = 2 pi J_O(nu) [1 + N_O(nu)] and J_A(nu) = 2 pi J_O(nu) N_O(nu).
// J_O vanishes for nu <= 0, so both densities do too.

#pragma once

#include <variant>
#include <vector>

namespace polaron {

// J_O(nu) = prefactor * nu^3, the dipole coupling of a 3D photon continuum.
struct CubicOptical {
    double prefactor{1.0};
};

// Energy-independent optical density. Rates built on it use the
// flat-density convention: sideband offsets do not change the optical
// factor, which is always evaluated at the transition energy itself.
struct FlatOptical {
    double value{1.0};
};

struct TabulatedOptical {
    std::vector<double> frequency;
    std::vector<double> value;
};

class OpticalBath {
public:
    using Family = std::variant<CubicOptical, FlatOptical, TabulatedOptical>;

    OpticalBath(Family family, double temperature);

    static OpticalBath cubic(double prefactor, double temperature);
    static OpticalBath flat(double value, double temperature);

    const Family& family() const noexcept { return family_; }
    double temperature() const noexcept { return temperature_; }
    bool is_flat() const noexcept { return std::holds_alternative<FlatOptical>(family_); }

    // J_O(nu); exactly 0 for nu <= 0.
    double coupling(double nu) const;

private:
    Family family_;
    double temperature_;
};

double photon_occupation(const OpticalBath& ob, double nu);
double emission_density(const OpticalBath& ob, double nu);
double absorption_density(const OpticalBath& ob, double nu);

}  // namespace polaron
