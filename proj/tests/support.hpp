// support.hpp - Independent reference computations shared by the tests

#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <vector>

#include "polaron/spectral_density.hpp"
#include "polaron/units.hpp"

namespace testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// int_0^inf J(w) w^(j-2) dw by double-exponential quadrature on the pointwise density.
inline double quadrature_moment(const polaron::SpectralDensity& sd, int order) {
    auto f = [&](double w) {
        // Far out the density underflows as inf * 0.
        const double v = polaron::evaluate_jv(sd, w) * std::pow(w, order - 2);
        return std::isfinite(v) ? v : 0.0;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, 1e-14);
}

// |<m|D(sqrt S)|n>|^2 for displaced oscillator levels.
inline double franck_condon(double S, int m, int n) {
    if (m > n) std::swap(m, n);
    const double log_pref = -S + (n - m) * std::log(S) + std::lgamma(m + 1.0) - std::lgamma(n + 1.0);
    const double lag = boost::math::laguerre(static_cast<unsigned>(m), static_cast<unsigned>(n - m), S);
    return std::exp(log_pref) * lag * lag;
}

// Thermal FC sum over levels p, q <= levels: weight of l = q - p.
inline double brute_force_amplitude(double S, double omega, double temperature, int l, int levels = 40) {
    const double x = temperature > 0.0 ? omega / polaron::thermal_energy(temperature) : INFINITY;
    double sum = 0.0;
    for (int p = 0; p <= levels; ++p) {
        const double boltzmann = temperature > 0.0 ? -std::expm1(-x) * std::exp(-x * p) : (p == 0 ? 1.0 : 0.0);
        const int q = p + l;
        if (q < 0 || q > levels || boltzmann == 0.0) continue;
        sum += boltzmann * franck_condon(S, p, q);
    }
    return sum;
}

// A_l as a Skellam distribution: difference of Poisson(S(1+N)) and Poisson(SN).
inline double skellam_amplitude(double S, double omega, double temperature, int l) {
    const double N = polaron::bose_occupation(omega, temperature);
    if (N == 0.0) return l < 0 ? 0.0 : std::exp(-S + l * std::log(S) - std::lgamma(l + 1.0));
    const double z = 2.0 * S * std::sqrt(N * (1.0 + N));
    const double log_bessel = std::log(boost::math::cyl_bessel_i(std::abs(l), z));
    return std::exp(-S * (1.0 + 2.0 * N) + 0.5 * l * std::log((1.0 + N) / N) + log_bessel);
}

}  // namespace testing
