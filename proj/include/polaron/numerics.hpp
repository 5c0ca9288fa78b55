// numerics.hpp - Special functions and Fourier quadrature used by the oracle

#pragma once

#include <complex>
#include <span>
#include <utility>

namespace polaron {

// psi_1(z) = sum_{k>=0} 1/(z+k)^2 for Re z > 0.
std::complex<double> trigamma(std::complex<double> z);

// Filon-Simpson rule on a uniform grid x_j = x0 + j h (odd sample count):
// returns (int f(x) cos(kx) dx, int f(x) sin(kx) dx) over [x0, x0 + (n-1) h].
std::pair<double, double> filon_cos_sin(std::span<const double> f, double x0, double h, double k);

}  // namespace polaron
