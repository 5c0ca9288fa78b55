#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "polaron/amplitude.hpp"
#include "polaron/errors.hpp"
#include "polaron/oracle.hpp"
#include "polaron/units.hpp"
#include "support.hpp"

using namespace polaron;
using testing::rel_err;

namespace {

double temperature_for(double kT_over_omega, double omega) { return kT_over_omega * omega / kBoltzmann; }

double table_mass(const AmplitudeTable& t) {
    double sum = 0.0;
    for (const auto& e : t.entries()) sum += e.value;
    return sum;
}

}  // namespace

TEST_CASE("uncoupled mode") {
    for (double T : {0.0, 300.0, 5000.0}) {
        const auto t = amplitude_table(0.0, 0.1, T);
        REQUIRE(t.entries().size() == 1);
        CHECK(t.entries()[0].l == 0);
        CHECK(t.entries()[0].value == 1.0);
    }
}

TEST_CASE("zero temperature reduces to the Poisson distribution") {
    const auto t = amplitude_table(2.0, 0.1, 0.0);
    CHECK(t[2] == doctest::Approx(0.27067).epsilon(1e-5));
    CHECK(t[2] == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(t.min_l() == 0);
    for (double S : {0.1, 1.0, 5.0, 15.0}) {
        const auto table = amplitude_table(S, 0.2, 0.0);
        for (const auto& e : table.entries()) {
            CAPTURE(S);
            CAPTURE(e.l);
            CHECK(e.l >= 0);
            CHECK(rel_err(e.value, poisson_limit(S, e.l)) < 1e-12);
        }
    }
}

TEST_CASE("poisson_limit examples") {
    CHECK(poisson_limit(0.0, 0) == 1.0);
    CHECK(poisson_limit(0.0, 3) == 0.0);
    CHECK(poisson_limit(2.0, 2) == doctest::Approx(0.270671).epsilon(1e-6));
    CHECK(poisson_limit(2.0, -1) == 0.0);
    CHECK(poisson_limit(200.0, 200) == doctest::Approx(std::exp(-200.0 + 200.0 * std::log(200.0) - std::lgamma(201.0))));
    CHECK_THROWS_AS(poisson_limit(-1.0, 0), InvalidArgument);
}

TEST_CASE("room temperature barely changes a 1 eV mode") {
    const auto cold = amplitude_table(15.0, 1.0, 0.0);
    const auto warm = amplitude_table(15.0, 1.0, 298.0);
    double sup = 0.0;
    for (int l = -5; l <= 60; ++l) sup = std::max(sup, std::abs(cold[l] - warm[l]));
    CHECK(sup < 1e-6);
    for (double T : {0.0, 298.0, 2000.0, 10000.0}) CHECK(amplitude_table(15.0, 1.0, T).argmax() == 15);
}

TEST_CASE("normalisation, positivity, argmax and first moment over the grid") {
    for (double S : {0.1, 1.0, 5.0, 15.0}) {
        for (double ratio : {0.0, 0.025, 0.5, 2.0}) {
            const double omega = 0.1;
            const auto t = amplitude_table(S, omega, temperature_for(ratio, omega));
            CAPTURE(S);
            CAPTURE(ratio);
            const double mass = table_mass(t);
            CHECK(mass <= 1.0 + 1e-15);
            CHECK(mass >= 1.0 - 1e-10);
            CHECK(t.mass_deficit() == doctest::Approx(1.0 - mass).epsilon(1e-12));
            CHECK(t.argmax() == static_cast<int>(std::lround(S)));
            double first = 0.0;
            for (const auto& e : t.entries()) {
                CHECK(e.value >= 0.0);
                first += e.l * e.value;
            }
            CHECK(first == doctest::Approx(S).epsilon(1e-8));
            if (ratio == 0.0) CHECK(t.min_l() >= 0);
        }
    }
}

TEST_CASE("thermal amplitudes follow the Skellam distribution") {
    for (double S : {0.3, 2.0, 8.0}) {
        for (double ratio : {0.1, 0.5, 3.0}) {
            const double omega = 0.05;
            const double T = temperature_for(ratio, omega);
            const auto t = amplitude_table(S, omega, T);
            const double peak = t[t.argmax()];
            for (const auto& e : t.entries()) {
                const double exact = testing::skellam_amplitude(S, omega, T, e.l);
                CAPTURE(S);
                CAPTURE(ratio);
                CAPTURE(e.l);
                // The series budget bounds absolute, not relative, tail errors.
                CHECK(std::abs(e.value - exact) < 1e-12);
                if (e.value > 1e-2 * peak) CHECK(rel_err(e.value, exact) < 1e-10);
            }
        }
    }
}

TEST_CASE("amplitudes agree with the Franck-Condon level sum") {
    for (double S : {0.05, 0.5, 1.0, 2.0}) {
        for (double ratio : {0.05, 0.3, 1.0}) {
            const double omega = 0.1;
            const double T = temperature_for(ratio, omega);
            const auto t = amplitude_table(S, omega, T);
            for (int l = -6; l <= 12; ++l) {
                CAPTURE(S);
                CAPTURE(ratio);
                CAPTURE(l);
                CHECK(std::abs(t[l] - testing::brute_force_amplitude(S, omega, T, l)) < 1e-8);
            }
        }
    }
}

TEST_CASE("amplitudes are the Fourier coefficients of the periodic propagator") {
    const double S = 1.0, omega = 0.1, T = 2000.0;
    const auto sd = SpectralDensity::discrete({{S, omega}});
    const auto t = amplitude_table(S, omega, T);
    const double phi0 = phonon_propagator(sd, T, 0.0).real();
    // Trapezoid over one period is exact for trigonometric polynomials below the sample count.
    const int samples = 512;
    const double period = 2.0 * kPi / omega;
    std::vector<std::complex<double>> g(samples);
    for (int k = 0; k < samples; ++k) g[k] = std::exp(phonon_propagator(sd, T, period * k / samples) - phi0);
    for (int l = -10; l <= 15; ++l) {
        std::complex<double> c = 0.0;
        for (int k = 0; k < samples; ++k) c += g[k] * std::polar(1.0, 2.0 * kPi * l * k / samples);
        c /= samples;
        CAPTURE(l);
        CHECK(std::abs(c.imag()) < 1e-12);
        CHECK(std::abs(t[l] - c.real()) < 1e-6);
    }
}

TEST_CASE("table reports its truncation") {
    const auto t = amplitude_table(5.0, 0.05, 1000.0);
    CHECK(t.series_terms() > 5);
    CHECK(t.thermal_cutoff() >= 1);
    CHECK(t.huang_rhys() == 5.0);
    CHECK(t.frequency() == 0.05);
    CHECK(t.temperature() == 1000.0);
    CHECK(t[100000] == 0.0);
}

TEST_CASE("large S needs more terms than a small cap allows") {
    AmplitudeOptions opts;
    opts.max_terms = 16;
    CHECK_THROWS_AS(amplitude_table(30.0, 0.1, 0.0, opts), TruncationFailure);
    CHECK_NOTHROW(amplitude_table(30.0, 0.1, 0.0));
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(amplitude_table(-1.0, 0.1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(amplitude_table(1.0, 0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(amplitude_table(1.0, 0.1, -5.0), InvalidArgument);
    AmplitudeOptions bad;
    bad.tolerance = 1.5;
    CHECK_THROWS_AS(amplitude_table(1.0, 0.1, 0.0, bad), InvalidArgument);
}
