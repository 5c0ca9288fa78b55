// optical_bath.cpp - Photon bath densities

#include "polaron/optical_bath.hpp"

#include <algorithm>
#include <cmath>

#include "polaron/errors.hpp"
#include "polaron/units.hpp"

namespace polaron {

OpticalBath::OpticalBath(Family family, double temperature) : family_(std::move(family)), temperature_(temperature) {
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        throw InvalidArgument("optical temperature must be finite and >= 0");
    if (const auto* tab = std::get_if<TabulatedOptical>(&family_)) {
        if (tab->frequency.size() != tab->value.size() || tab->frequency.size() < 2)
            throw InvalidArgument("tabulated optical density needs >= 2 (nu, J) samples");
        for (std::size_t i = 1; i < tab->frequency.size(); ++i)
            if (!(tab->frequency[i] > tab->frequency[i - 1]))
                throw InvalidArgument("tabulated optical frequencies must be strictly increasing");
        for (double v : tab->value)
            if (!(std::isfinite(v) && v >= 0.0)) throw InvalidArgument("tabulated optical density must be >= 0");
    }
    if (const auto* c = std::get_if<CubicOptical>(&family_); c && !(c->prefactor >= 0.0))
        throw InvalidArgument("optical prefactor must be >= 0");
    if (const auto* f = std::get_if<FlatOptical>(&family_); f && !(f->value >= 0.0))
        throw InvalidArgument("flat optical density must be >= 0");
}

OpticalBath OpticalBath::cubic(double prefactor, double temperature) {
    return OpticalBath(CubicOptical{prefactor}, temperature);
}

OpticalBath OpticalBath::flat(double value, double temperature) {
    return OpticalBath(FlatOptical{value}, temperature);
}

double OpticalBath::coupling(double nu) const {
    if (!(nu > 0.0)) return 0.0;
    if (const auto* c = std::get_if<CubicOptical>(&family_)) return c->prefactor * nu * nu * nu;
    if (const auto* f = std::get_if<FlatOptical>(&family_)) return f->value;
    const auto& tab = std::get<TabulatedOptical>(family_);
    const auto& x = tab.frequency;
    if (nu < x.front() || nu > x.back()) return 0.0;
    auto hi = std::upper_bound(x.begin(), x.end(), nu);
    if (hi == x.end()) return tab.value.back();
    const auto i = static_cast<std::size_t>(hi - x.begin());
    const double t = (nu - x[i - 1]) / (x[i] - x[i - 1]);
    return tab.value[i - 1] + t * (tab.value[i] - tab.value[i - 1]);
}

double photon_occupation(const OpticalBath& ob, double nu) { return bose_occupation(nu, ob.temperature()); }

double emission_density(const OpticalBath& ob, double nu) {
    if (!(nu > 0.0)) return 0.0;
    return 2.0 * kPi * ob.coupling(nu) * (1.0 + photon_occupation(ob, nu));
}

double absorption_density(const OpticalBath& ob, double nu) {
    if (!(nu > 0.0)) return 0.0;
    return 2.0 * kPi * ob.coupling(nu) * photon_occupation(ob, nu);
}

}  // namespace polaron
