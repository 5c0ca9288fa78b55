// oracle.hpp - Direct-integration evaluation of the polaron rate function
//
// The vibrational kernel is
//
//   K(eps) = (1/pi) Re int_0^inf dt exp(phi(t) - phi(0)) exp(i eps t)
//   phi(t) = int dw J_V(w)/w^2 [cos(wt) coth(beta_V w/2) - i sin(wt)]
//
// and splits into a delta peak of weight exp(-phi(0)) at eps = 0 plus a smooth
// density. The smooth part is itself the one-phonon density
//
//   P(eps) = J_V(|eps|)/eps^2 (n(|eps|) + 1)   eps > 0
//          = J_V(|eps|)/eps^2 n(|eps|)         eps < 0
//
// plus the Fourier transform of R(t) = exp(phi) - 1 - phi, all times
// exp(-phi(0)). For the cubic-exponential density at T_V = 0 the kernel is
// a Poisson mixture of Gamma(2n, wc) densities and is evaluated in closed form.
// None of this shares code with the truncation path.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "polaron/optical_bath.hpp"
#include "polaron/prf.hpp"
#include "polaron/spectral_density.hpp"

namespace polaron {

struct QuadratureConfig {
    double relative_tolerance{1e-9};    // adaptive frequency quadrature
    double tail_tolerance{1e-10};       // |exp(-phi(0)) R(T_max)| certificate
    double time_step_factor{0.05};      // dt = factor / (largest kernel frequency scale)
    std::size_t max_time_samples{1u << 21};
    int frequency_samples{65537};       // Filon grid for sampled phi(t), generic densities
    double window_sigmas{15.0};         // energy window half-width in kernel standard deviations
    double panel_fraction{0.125};       // energy panel width relative to the mean phonon frequency
    bool use_closed_forms{true};        // false forces the generic numerical routes
};

// phi(t). Closed forms for cubic-exponential and discrete densities, adaptive
// quadrature otherwise. Throws DivergentMoment when phi(0) does not exist.
std::complex<double> phonon_propagator(const SpectralDensity& sd, double vibrational_temperature, double t,
                                       const QuadratureConfig& cfg = {});

struct PropagatorSamples {
    double time_step{0.0};                     // t_k = k * time_step, k = 0..size-1
    std::vector<std::complex<double>> values;  // phi(t_k)
    double phi_zero{0.0};
    double tail_certificate{0.0};              // |exp(phi(t_end) - phi(0)) - exp(-phi(0))|
};

PropagatorSamples sample_propagator(const SpectralDensity& sd, double vibrational_temperature, double time_step,
                                    std::size_t count, const QuadratureConfig& cfg = {});

struct KernelValue {
    double delta_weight{0.0};  // exp(-phi(0))
    double smooth{0.0};        // 1/eV
};

// Kernel with its integration window. Construction does all time-domain work;
// smooth() is then cheap.
class VibrationalKernel {
public:
    virtual ~VibrationalKernel() = default;

    virtual double delta_weight() const = 0;
    virtual double smooth(double eps) const = 0;

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    double panel_width() const noexcept { return panel_width_; }
    bool converged() const noexcept { return converged_; }
    double tail_certificate() const noexcept { return tail_certificate_; }

protected:
    double lower_{0.0};
    double upper_{0.0};
    double panel_width_{0.0};
    bool converged_{true};
    double tail_certificate_{0.0};
};

// Throws NonDecayingPropagator for discrete densities and DivergentMoment if
// phi(0) is infinite.
std::unique_ptr<VibrationalKernel> make_kernel(const SpectralDensity& sd, double vibrational_temperature,
                                               const QuadratureConfig& cfg = {});

KernelValue k_function(const SpectralDensity& sd, double vibrational_temperature, double eps,
                       const QuadratureConfig& cfg = {});

// int d eps of the smooth part over the kernel window.
double smooth_kernel_mass(const VibrationalKernel& kernel);

// gamma(eta) by direct integration over the kernel.
double prf_numerical(double eta, const SpectralDensity& sd, const OpticalBath& ob, double vibrational_temperature,
                     const QuadratureConfig& cfg = {});

struct OracleResult {
    RateResult rates;          // bath left empty
    bool converged{true};
    double delta_weight{0.0};
    double smooth_mass{0.0};   // should equal 1 - delta_weight
};

// gamma_up = gamma(-delta') and gamma_down = gamma(delta') from one kernel.
OracleResult oracle_rates(double polaron_energy, const SpectralDensity& sd, const OpticalBath& ob,
                          double vibrational_temperature, const QuadratureConfig& cfg = {});

}  // namespace polaron
