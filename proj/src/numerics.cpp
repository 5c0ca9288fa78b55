// numerics.cpp - Complex trigamma and Filon quadrature

#include "polaron/numerics.hpp"

#include <cmath>

#include "polaron/errors.hpp"

namespace polaron {

std::complex<double> trigamma(std::complex<double> z) {
    if (!(z.real() > 0.0)) throw InvalidArgument("trigamma: Re z must be > 0");
    std::complex<double> shift = 0.0;
    while (std::abs(z) < 16.0) {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    // Asymptotic series with Bernoulli numbers B_2 .. B_14.
    const std::complex<double> w = 1.0 / z, w2 = w * w;
    constexpr double b[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
    std::complex<double> series = 0.0;
    for (int k = 6; k >= 0; --k) series = series * w2 + b[k];
    return shift + w + 0.5 * w2 + series * w2 * w;
}

namespace {

// Filon weights alpha, beta, gamma as functions of theta = k h. The closed
// forms cancel badly for small theta, where the Taylor series is used.
void filon_weights(double theta, double& alpha, double& beta, double& gamma) {
    if (std::abs(theta) < 0.25) {
        const double t2 = theta * theta;
        alpha = theta * t2 * (2.0 / 45 + t2 * (-2.0 / 315 + t2 * (2.0 / 4725 + t2 * (-8.0 / 467775 + t2 * (4.0 / 8513505)))));
        beta = 2.0 / 3 + t2 * (2.0 / 15 + t2 * (-4.0 / 105 + t2 * (2.0 / 567 + t2 * (-4.0 / 22275 + t2 * (4.0 / 675675)))));
        gamma = 4.0 / 3 + t2 * (-2.0 / 15 + t2 * (1.0 / 210 + t2 * (-1.0 / 11340 + t2 * (1.0 / 997920 - t2 / 129729600))));
        return;
    }
    const double s = std::sin(theta), c = std::cos(theta), t3 = theta * theta * theta;
    alpha = (theta * theta + theta * s * c - 2.0 * s * s) / t3;
    beta = 2.0 * (theta * (1.0 + c * c) - 2.0 * s * c) / t3;
    gamma = 4.0 * (s - theta * c) / t3;
}

}  // namespace

std::pair<double, double> filon_cos_sin(std::span<const double> f, double x0, double h, double k) {
    const std::size_t n = f.size();
    if (n < 3 || n % 2 == 0) throw InvalidArgument("filon_cos_sin needs an odd number (>= 3) of samples");
    double alpha, beta, gamma;
    filon_weights(k * h, alpha, beta, gamma);

    double c_even = 0.0, s_even = 0.0, c_odd = 0.0, s_odd = 0.0;
    // Phase rotation by recurrence, resynchronised periodically.
    const std::complex<double> step = std::polar(1.0, k * h);
    std::complex<double> phase;
    for (std::size_t j = 0; j < n; ++j) {
        if (j % 256 == 0)
            phase = std::polar(1.0, k * (x0 + static_cast<double>(j) * h));
        else
            phase *= step;
        const double fc = f[j] * phase.real(), fs = f[j] * phase.imag();
        if (j % 2 == 0) {
            const double half = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            c_even += half * fc;
            s_even += half * fs;
        } else {
            c_odd += fc;
            s_odd += fs;
        }
    }
    const double xa = x0, xb = x0 + static_cast<double>(n - 1) * h;
    const double cos_int = h * (alpha * (f[n - 1] * std::sin(k * xb) - f[0] * std::sin(k * xa)) + beta * c_even + gamma * c_odd);
    const double sin_int = h * (alpha * (f[0] * std::cos(k * xa) - f[n - 1] * std::cos(k * xb)) + beta * s_even + gamma * s_odd);
    return {cos_int, sin_int};
}

}  // namespace polaron
