#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>

#include "polaron/errors.hpp"
#include "polaron/moment_matching.hpp"
#include "polaron/numerics.hpp"
#include "polaron/oracle.hpp"
#include "polaron/prf.hpp"
#include "polaron/units.hpp"
#include "support.hpp"

using namespace polaron;
using testing::rel_err;
using cplx = std::complex<double>;
using namespace std::complex_literals;

namespace {

const OpticalBath kSun = OpticalBath::cubic(1.0, 6000.0);

QuadratureConfig generic_routes() {
    QuadratureConfig cfg;
    cfg.use_closed_forms = false;
    return cfg;
}

// int f over the kernel window, optionally stretched upward, split into the kernel's own panels.
template <class F>
double window_integral(const VibrationalKernel& k, F f, double stretch = 1.0) {
    double sum = 0.0;
    const double width = k.panel_width();
    const double upper = k.lower() + stretch * (k.upper() - k.lower());
    for (double a = k.lower(); a < upper; a += width) {
        const double b = std::min(a + width, upper);
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-13);
    }
    return sum;
}

double one_phonon_density(const SpectralDensity& sd, double T, double eps) {
    const double w = std::abs(eps);
    const double n = bose_occupation(w, T);
    return evaluate_jv(sd, w) / (w * w) * (eps > 0 ? n + 1.0 : n);
}

}  // namespace

TEST_CASE("trigamma") {
    CHECK(std::abs(trigamma(1.0) - kPi * kPi / 6.0) < 1e-14);
    CHECK(std::abs(trigamma(0.5) - kPi * kPi / 2.0) < 1e-14);
    CHECK(std::abs(trigamma(100.0) - 0.010050166663333571) < 1e-16);
    for (cplx z : {cplx(0.3, 2.0), cplx(5.0, -40.0), cplx(1e3, 1e3)}) {
        // Direct sum with the Euler-Maclaurin tail 1/(z+K) + 1/(2 (z+K)^2) + 1/(6 (z+K)^3).
        cplx sum = 0.0;
        const int K = 200000;
        for (int k = 0; k < K; ++k) sum += 1.0 / ((z + double(k)) * (z + double(k)));
        const cplx zk = z + double(K);
        sum += 1.0 / zk + 0.5 / (zk * zk) + 1.0 / (6.0 * zk * zk * zk);
        CAPTURE(z);
        CHECK(std::abs(trigamma(z) - sum) < 1e-12 * std::abs(sum));
    }
    CHECK_THROWS_AS(trigamma(cplx(-0.5, 1.0)), InvalidArgument);
}

TEST_CASE("Filon-Simpson against analytic Fourier integrals") {
    const double a = 0.0, b = 10.0;
    const int n = 2001;
    const double h = (b - a) / (n - 1);
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) f[j] = std::exp(-(a + j * h));
    std::vector<double> fine(2 * n - 1);
    for (int j = 0; j < 2 * n - 1; ++j) fine[j] = std::exp(-(a + j * h / 2));
    for (double k : {0.0, 1e-3, 0.7, 12.0, 300.0}) {
        auto cos_primitive = [k](double x) { return std::exp(-x) * (k * std::sin(k * x) - std::cos(k * x)) / (1 + k * k); };
        auto sin_primitive = [k](double x) { return -std::exp(-x) * (std::sin(k * x) + k * std::cos(k * x)) / (1 + k * k); };
        const double c_exact = cos_primitive(b) - cos_primitive(a), s_exact = sin_primitive(b) - sin_primitive(a);
        const auto [c, s] = filon_cos_sin(f, a, h, k);
        const auto [c2, s2] = filon_cos_sin(fine, a, h / 2, k);
        const double err = std::abs(c - c_exact) + std::abs(s - s_exact);
        const double err2 = std::abs(c2 - c_exact) + std::abs(s2 - s_exact);
        CAPTURE(k);
        CAPTURE(err);
        CAPTURE(err2);
        CHECK(err < 1e-10);
        // Fourth-order convergence in h until roundoff takes over.
        CHECK((err2 < 1e-14 || err / err2 > 12.0));
    }
    const std::vector<double> even(4, 1.0);
    CHECK_THROWS_AS(filon_cos_sin(even, 0.0, 0.1, 1.0), InvalidArgument);
}

TEST_CASE("propagator basics") {
    const auto cubic = SpectralDensity::cubic_exponential(1.7, 0.2);
    CHECK(phonon_propagator(cubic, 0.0, 0.0) == cplx(1.7, 0.0));
    CHECK(phonon_propagator(cubic, 0.0, 3.0).real() == doctest::Approx((1.7 / ((1.0 + 0.6i) * (1.0 + 0.6i))).real()));

    const auto mode = SpectralDensity::discrete({{0.8, 0.1}});
    const double t = 2.3;
    const cplx expected = 0.8 * std::exp(cplx(0.0, -0.1 * t));
    CHECK(std::abs(phonon_propagator(mode, 0.0, t) - expected) < 1e-15);
    const double coth = 1.0 / std::tanh(0.1 / (2.0 * thermal_energy(900.0)));
    CHECK(phonon_propagator(mode, 900.0, 0.0).real() == doctest::Approx(0.8 * coth).epsilon(1e-14));

    for (double T : {0.0, 300.0, 2000.0}) {
        for (const auto& sd : {cubic, SpectralDensity::log_normal_ohmic(0.02, 0.1)}) {
            const cplx phi0 = phonon_propagator(sd, T, 0.0, generic_routes());
            CHECK(std::abs(phi0.imag()) < 1e-12 * phi0.real());
        }
    }
}

TEST_CASE("closed-form cubic propagator matches quadrature") {
    const auto sd = SpectralDensity::cubic_exponential(2.0, 0.05);
    for (double T : {0.0, 150.0, 1000.0, 5000.0}) {
        for (double t : {0.0, 0.5, 7.0, 40.0, 300.0}) {
            const cplx closed = phonon_propagator(sd, T, t);
            const cplx numeric = phonon_propagator(sd, T, t, generic_routes());
            CAPTURE(T);
            CAPTURE(t);
            CHECK(std::abs(closed - numeric) < 1e-9 * std::abs(phonon_propagator(sd, T, 0.0)));
        }
    }
}

TEST_CASE("propagator is Hermitian in time") {
    const auto sd = SpectralDensity::log_normal_ohmic(0.02, 0.1);
    for (double T : {0.0, 700.0}) {
        for (double t : {0.3, 4.0, 25.0}) {
            const cplx forward = phonon_propagator(sd, T, t);
            const cplx backward = phonon_propagator(sd, T, -t);
            CHECK(std::abs(forward - std::conj(backward)) < 1e-12 * std::abs(forward));
        }
    }
}

TEST_CASE("sampled propagator agrees with pointwise values and certifies its tail") {
    const auto sd = SpectralDensity::log_normal_ohmic(0.05, 0.1);
    const double dt = 0.25;
    const auto samples = sample_propagator(sd, 300.0, dt, 4001);
    CHECK(samples.values.size() == 4001);
    CHECK(samples.phi_zero == doctest::Approx(phonon_propagator(sd, 300.0, 0.0).real()).epsilon(1e-8));
    for (std::size_t k : {1u, 100u, 1000u, 4000u})
        CHECK(std::abs(samples.values[k] - phonon_propagator(sd, 300.0, k * dt)) < 1e-8 * samples.phi_zero);
    CHECK(samples.tail_certificate < 1e-6);
    CHECK_THROWS_AS(sample_propagator(sd, 300.0, 0.0, 10), InvalidArgument);
}

TEST_CASE("smooth kernel mass complements the delta peak") {
    struct Case {
        SpectralDensity sd;
        double T;
        QuadratureConfig cfg;
    };
    const std::vector<Case> cases{
        {SpectralDensity::cubic_exponential(1.0, 0.2), 0.0, {}},
        {SpectralDensity::cubic_exponential(1.0, 0.2), 0.0, generic_routes()},
        {SpectralDensity::cubic_exponential(0.5, 0.05), 1500.0, {}},
        {SpectralDensity::log_normal_ohmic(0.05, 0.1), 0.0, {}},
        {SpectralDensity::log_normal_ohmic(0.05, 0.1), 800.0, {}},
    };
    for (const auto& c : cases) {
        const auto kernel = make_kernel(c.sd, c.T, c.cfg);
        const double phi0 = phonon_propagator(c.sd, c.T, 0.0).real();
        CAPTURE(c.sd.name());
        CAPTURE(c.T);
        CHECK(kernel->converged());
        CHECK(kernel->delta_weight() == doctest::Approx(std::exp(-phi0)).epsilon(1e-10));
        CHECK(std::abs(smooth_kernel_mass(*kernel) - (1.0 - std::exp(-phi0))) < 1e-6);
        for (int i = 0; i <= 40; ++i) {
            const double eps = kernel->lower() + (kernel->upper() - kernel->lower()) * i / 40.0;
            CHECK(kernel->smooth(eps) > -1e-8);
        }
    }
}

TEST_CASE("weak-coupling kernel is the one-phonon density") {
    const double S = 1e-4;
    const auto sd = SpectralDensity::cubic_exponential(S, 0.1);
    for (double T : {0.0, 1200.0}) {
        for (double eps : {0.05, 0.1, 0.3, -0.05, -0.1}) {
            if (T == 0.0 && eps < 0) continue;
            const auto k = k_function(sd, T, eps, generic_routes());
            CAPTURE(T);
            CAPTURE(eps);
            CHECK(rel_err(k.smooth, std::exp(-S) * one_phonon_density(sd, T, eps)) < 1e-3);
        }
    }
}

TEST_CASE("closed-form and numerical zero-temperature kernels agree") {
    const auto sd = SpectralDensity::cubic_exponential(1.0, 0.2);
    const auto closed = make_kernel(sd, 0.0);
    const auto numeric = make_kernel(sd, 0.0, generic_routes());
    double peak = 0.0;
    for (int i = 1; i <= 200; ++i) peak = std::max(peak, closed->smooth(0.01 * i));
    for (int i = 1; i <= 200; ++i) {
        const double eps = 0.01 * i;
        CAPTURE(eps);
        CHECK(std::abs(closed->smooth(eps) - numeric->smooth(eps)) < 1e-7 * peak);
    }
    CHECK(closed->delta_weight() == doctest::Approx(numeric->delta_weight()).epsilon(1e-12));
}

TEST_CASE("kernel moments equal the truncated comb moments through order 2N*") {
    const auto sd = SpectralDensity::cubic_exponential(1.0, 0.2);
    const auto kernel = make_kernel(sd, 0.0);
    // High moments amplify pruned far-tail lines, so the comb is kept nearly unpruned here.
    SidebandOptions tight;
    tight.amplitude.tolerance = 1e-15;
    tight.pruning_threshold = 1e-20;
    for (int n_modes = 1; n_modes <= 3; ++n_modes) {
        const auto bath = truncate(sd, n_modes);
        const auto spectrum = sideband_spectrum(bath, 0.0, tight);
        // Raw moments of the compound Poisson comb from its cumulants sum_i S_i w_i^n.
        std::vector<double> raw{1.0};
        for (int n = 1; n <= 2 * n_modes; ++n) {
            double m = 0.0;
            for (int k = 1; k <= n; ++k) m += std::exp(std::lgamma(n) - std::lgamma(k) - std::lgamma(n - k + 1)) * bath.moment(k) * raw[n - k];
            raw.push_back(m);
        }
        for (int order = 1; order <= 2 * n_modes; ++order) {
            // The rate window clips about 5e-9 of the sixth moment; extend past it.
            const double kernel_moment =
                window_integral(*kernel, [&](double e) { return std::pow(e, order) * kernel->smooth(e); }, 2.0);
            double comb_moment = 0.0;
            for (const auto& line : spectrum.lines) comb_moment += line.weight * std::pow(line.offset, order);
            CAPTURE(n_modes);
            CAPTURE(order);
            CHECK(rel_err(kernel_moment, raw[order]) < 1e-10);
            CHECK(rel_err(kernel_moment, comb_moment) < 1e-10);
        }
    }
}

TEST_CASE("prf_numerical reference limits") {
    const auto weak_sd = SpectralDensity::cubic_exponential(1e-9, 0.2);
    const auto weak = weak_limit_rates(1.0, kSun);
    CHECK(rel_err(prf_numerical(1.0, weak_sd, kSun, 0.0), weak.down.total) < 1e-8);
    CHECK(rel_err(prf_numerical(-1.0, weak_sd, kSun, 0.0), weak.up.total) < 1e-8);

    const auto flat = OpticalBath::flat(0.5, 6000.0);
    const auto sd = SpectralDensity::cubic_exponential(2.0, 0.05);
    const auto reference = flat_limit_rates(1.0, flat);
    CHECK(rel_err(prf_numerical(1.0, sd, flat, 300.0), reference.down.total) < 1e-6);
    CHECK(rel_err(prf_numerical(-1.0, sd, flat, 300.0), reference.up.total) < 1e-6);
}

TEST_CASE("oracle matches frozen zero-temperature references") {
    // Poisson-Gamma mixture kernel integrated in 30-digit arithmetic.
    struct Ref {
        double wc, S, up, down;
    };
    const Ref refs[] = {
        {0.01, 0.02, 1.062060427814142, 7.337304325737959},
        {0.01, 40.0, 1.153659465594079, 0.2836507606998154},
        {0.05, 4.0, 1.1900732482968168, 2.5821605878760075},
        {0.2, 1.0, 1.1006368371652236, 3.9021060555852646},
        {0.2, 4.0, 0.75437563241925179, 0.99169975519980297},
    };
    for (const auto& r : refs) {
        const auto sd = SpectralDensity::cubic_exponential(r.S, r.wc);
        const auto out = oracle_rates(1.0, sd, kSun, 0.0);
        CAPTURE(r.wc);
        CAPTURE(r.S);
        CHECK(out.converged);
        CHECK(rel_err(out.rates.up.total, r.up) < 1e-8);
        CHECK(rel_err(out.rates.down.total, r.down) < 1e-8);
        CHECK(std::abs(out.rates.mass_deficit) < 1e-8);
    }
}

TEST_CASE("oracle matches frozen finite-temperature references") {
    // Kernel expanded to second order in S (cubic, S = 1e-3, wc = 0.2);
    // the expansion itself is accurate to about 1e-9.
    struct Ref {
        double T, up, down;
    };
    const Ref refs[] = {
        {0.0, 1.0618762255009275, 7.3403159379656},
        {300.0, 1.0618761427773538, 7.340317574019959},
        {1000.0, 1.0618721247690952, 7.340399036183565},
        {2000.0, 1.0618521004657462, 7.340823285647917},
    };
    const auto sd = SpectralDensity::cubic_exponential(1e-3, 0.2);
    for (const auto& r : refs) {
        for (const auto& cfg : {QuadratureConfig{}, generic_routes()}) {
            const auto out = oracle_rates(1.0, sd, kSun, r.T, cfg);
            CAPTURE(r.T);
            CAPTURE(cfg.use_closed_forms);
            CHECK(rel_err(out.rates.up.total, r.up) < 1e-8);
            CHECK(rel_err(out.rates.down.total, r.down) < 1e-8);
        }
    }
}

TEST_CASE("narrow tabulated peak approaches the discrete mode") {
    // J(w) = S w^2 g(w) with g a narrow normalised Gaussian at w0.
    const double S = 0.5, w0 = 0.1, width = 0.002;
    std::vector<double> w, j;
    for (int i = 0; i <= 2000; ++i) {
        const double x = w0 - 12 * width + 24 * width * i / 2000.0;
        w.push_back(x);
        const double g = std::exp(-0.5 * (x - w0) * (x - w0) / (width * width)) / (std::sqrt(2 * kPi) * width);
        j.push_back(S * x * x * g);
    }
    const auto broad = SpectralDensity::tabulated(w, j);
    const auto exact = rates(1.0, truncate(SpectralDensity::discrete({{S, w0}}), 1), kSun, 0.0);
    const auto out = oracle_rates(1.0, broad, kSun, 0.0);
    CHECK(rel_err(out.rates.up.total, exact.up.total) < 1e-3);
    CHECK(rel_err(out.rates.down.total, exact.down.total) < 1e-3);
}

TEST_CASE("kernel domain errors") {
    CHECK_THROWS_AS(make_kernel(SpectralDensity::discrete({{1.0, 0.1}}), 0.0), NonDecayingPropagator);
    CHECK_THROWS_AS(make_kernel(SpectralDensity::gaussian_ohmic(0.01, 0.2), 0.0), DivergentMoment);
    CHECK_THROWS_AS(phonon_propagator(SpectralDensity::gaussian_ohmic(0.01, 0.2), 0.0, 1.0), DivergentMoment);
    CHECK_THROWS_AS(make_kernel(SpectralDensity::tabulated({0.0, 0.1, 0.2}, {0.0, 0.1, 0.0}), 0.0), DivergentMoment);
    CHECK_THROWS_AS(make_kernel(SpectralDensity::cubic_exponential(1.0, 0.2), -1.0), InvalidArgument);
    CHECK_THROWS_AS(oracle_rates(NAN, SpectralDensity::cubic_exponential(1.0, 0.2), kSun, 0.0), InvalidArgument);
}
