// oracle.cpp - Direct time-domain evaluation of the vibrational kernel

#include "polaron/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "polaron/errors.hpp"
#include "polaron/numerics.hpp"
#include "polaron/units.hpp"

namespace polaron {

namespace {

using cplx = std::complex<double>;
using GaussRule = boost::math::quadrature::gauss<double, 20>;

// coth(w / 2kT) = 1 + 2 n(w)
double coth_factor(double omega, double temperature) { return 1.0 + 2.0 * bose_occupation(omega, temperature); }

// phi(0) must be finite and phi(t) must decay for the delta/smooth split.
void require_decaying(const SpectralDensity& sd) {
    if (sd.holds<DiscreteModes>())
        throw NonDecayingPropagator(
            "discrete modes never decay in time; their kernel is a delta comb handled by the amplitude tables");
    if (sd.holds<GaussianOhmic>())
        throw DivergentMoment("phi(0) = int J/w^2 diverges at w -> 0 for an ohmic density");
    if (const auto* t = std::get_if<Tabulated>(&sd.family())) {
        if (t->frequency.front() == 0.0 && (t->value[0] > 0.0 || t->value[1] > 0.0))
            throw DivergentMoment("phi(0) = int J/w^2 diverges: tabulated density is not superlinear at w -> 0");
    }
}

bool is_cubic(const SpectralDensity& sd, const QuadratureConfig& cfg) {
    return cfg.use_closed_forms && sd.holds<CubicExponential>();
}

// Cubic-exponential propagator. The thermal part sums geometric series of
// Bose factors into a trigamma:
//   2S/wc^2 sum_k Re 1/(1/wc + k beta - i t)^2 = 2S/(wc beta)^2 Re psi_1(1 + (1/wc - i t)/beta).
cplx cubic_propagator(const CubicExponential& c, double temperature, double t) {
    const double x = c.cutoff * t;
    cplx value = c.huang_rhys / ((1.0 + cplx(0.0, x)) * (1.0 + cplx(0.0, x)));
    if (temperature > 0.0) {
        const double beta = 1.0 / thermal_energy(temperature);
        const cplx z = 1.0 + cplx(1.0 / c.cutoff, -t) / beta;
        value += 2.0 * c.huang_rhys / (c.cutoff * c.cutoff * beta * beta) * trigamma(z).real();
    }
    return value;
}

cplx discrete_propagator(const DiscreteModes& d, double temperature, double t) {
    cplx value = 0.0;
    for (const auto& m : d.modes)
        value += m.huang_rhys * cplx(std::cos(m.frequency * t) * coth_factor(m.frequency, temperature),
                                     -std::sin(m.frequency * t));
    return value;
}

// Integration panels on [0, upper]: geometric refinement toward w = 0, then
// uniform panels no wider than width; tabulated grid points are kinks.
std::vector<double> frequency_breakpoints(const SpectralDensity& sd, double upper, double scale, double width) {
    std::vector<double> points{0.0};
    if (const auto* tab = std::get_if<Tabulated>(&sd.family())) {
        for (std::size_t i = 0; i < tab->frequency.size(); ++i) {
            const double a = i == 0 ? 0.0 : tab->frequency[i - 1];
            const double b = tab->frequency[i];
            const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
            for (int p = 1; p <= pieces; ++p) points.push_back(a + (b - a) * p / pieces);
        }
    } else {
        for (int k = 30; k >= 1; --k) points.push_back(std::ldexp(scale, -k));
        const int pieces = std::max(1, static_cast<int>(std::ceil((upper - scale) / width)));
        for (int p = 0; p <= pieces; ++p) points.push_back(scale + (upper - scale) * p / pieces);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

// int_0^upper dw J(w) g(w) by adaptive Gauss-Kronrod on each panel.
double integrate_density(const SpectralDensity& sd, const std::function<double(double)>& g, double t,
                         double rel_tol) {
    const double upper = frequency_cutoff(sd, 1, 1e-16);
    const double scale = spectral_area(sd) / reorganisation_energy(sd);
    double width = scale;
    if (t != 0.0) width = std::min(width, kPi / std::abs(t));
    const auto points = frequency_breakpoints(sd, upper, scale, width);
    auto integrand = [&](double w) { return w > 0.0 ? evaluate_jv(sd, w) * g(w) : 0.0; };
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, points[i - 1], points[i],
                                                                               12, rel_tol);
    if (!std::isfinite(total)) throw DivergentMoment("frequency quadrature did not converge");
    return total;
}

cplx quadrature_propagator(const SpectralDensity& sd, double temperature, double t, double rel_tol) {
    const double re = integrate_density(
        sd, [&](double w) { return std::cos(w * t) * coth_factor(w, temperature) / (w * w); }, t, rel_tol);
    const double im =
        t == 0.0 ? 0.0 : integrate_density(sd, [&](double w) { return -std::sin(w * t) / (w * w); }, t, rel_tol);
    return {re, im};
}

// phi(t) on a sampled time axis: closed forms where available, otherwise
// Filon rules on fixed frequency segments so each time costs O(grid). The
// segments halve geometrically toward w = 0, where J coth / w^2 is sharpest.
class PropagatorSampler {
public:
    PropagatorSampler(const SpectralDensity& sd, double temperature, const QuadratureConfig& cfg)
        : sd_(sd), temperature_(temperature), cfg_(cfg) {
        if (is_cubic(sd, cfg) || sd.holds<DiscreteModes>()) return;
        require_decaying(sd);
        int n = std::max(3, cfg.frequency_samples);
        if (n % 2 == 0) ++n;
        const double hi = frequency_cutoff(sd, 1, 1e-16);
        if (const auto* tab = std::get_if<Tabulated>(&sd.family())) {
            add_segment(tab->frequency.front(), hi, n);
            return;
        }
        const double scale = std::min(spectral_area(sd) / reorganisation_energy(sd), 0.5 * hi);
        for (int k = kRefinements; k >= 1; --k) add_segment(std::ldexp(scale, -k), std::ldexp(scale, 1 - k), kRefinedSamples);
        add_segment(scale, hi, n);
    }

    cplx operator()(double t) const {
        if (const auto* c = std::get_if<CubicExponential>(&sd_.family()); c && cfg_.use_closed_forms)
            return cubic_propagator(*c, temperature_, t);
        if (const auto* d = std::get_if<DiscreteModes>(&sd_.family())) return discrete_propagator(*d, temperature_, t);
        cplx value = 0.0;
        for (const auto& seg : segments_)
            value += cplx(filon_cos_sin(seg.cos_weight, seg.origin, seg.step, t).first,
                          -filon_cos_sin(seg.sin_weight, seg.origin, seg.step, t).second);
        return value;
    }

private:
    static constexpr int kRefinements = 40;
    static constexpr int kRefinedSamples = 129;

    struct Segment {
        double origin;
        double step;
        std::vector<double> cos_weight;  // J coth / w^2
        std::vector<double> sin_weight;  // J / w^2
    };

    void add_segment(double lo, double hi, int n) {
        Segment seg{lo, (hi - lo) / (n - 1), {}, {}};
        seg.cos_weight.resize(static_cast<std::size_t>(n));
        seg.sin_weight.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double w = lo + j * seg.step;
            const double g = w > 0.0 ? evaluate_jv(sd_, w) / (w * w) : 0.0;
            seg.sin_weight[static_cast<std::size_t>(j)] = g;
            seg.cos_weight[static_cast<std::size_t>(j)] = w > 0.0 ? g * coth_factor(w, temperature_) : 0.0;
        }
        segments_.push_back(std::move(seg));
    }

    const SpectralDensity& sd_;
    double temperature_;
    QuadratureConfig cfg_;
    std::vector<Segment> segments_;
};

// Scales that size the energy window and the time step.
struct KernelScales {
    double phi_zero;
    double reorganisation;  // first cumulant
    double width;           // sqrt of the second cumulant, int J coth
    double mean_frequency;  // A_V / lambda
    double tail_frequency;  // J negligible beyond this
};

KernelScales kernel_scales(const SpectralDensity& sd, double temperature, const QuadratureConfig& cfg) {
    KernelScales s{};
    s.reorganisation = reorganisation_energy(sd);
    s.mean_frequency = spectral_area(sd) / s.reorganisation;
    s.tail_frequency = frequency_cutoff(sd, 1, 1e-15);
    s.phi_zero = phonon_propagator(sd, temperature, 0.0, cfg).real();
    if (const auto* c = std::get_if<CubicExponential>(&sd.family()); c && temperature == 0.0)
        s.width = std::sqrt(6.0 * c->huang_rhys) * c->cutoff;
    else
        s.width = std::sqrt(integrate_density(
            sd, [&](double w) { return coth_factor(w, temperature); }, 0.0, cfg.relative_tolerance));
    return s;
}

void set_window(double& lower, double& upper, double& panel, const KernelScales& s, double temperature,
                const QuadratureConfig& cfg) {
    upper = std::max(s.tail_frequency, s.reorganisation + cfg.window_sigmas * s.width);
    lower = 0.0;
    if (temperature > 0.0)
        lower = std::max(-s.tail_frequency,
                         std::min(s.reorganisation - cfg.window_sigmas * s.width, -50.0 * thermal_energy(temperature)));
    panel = std::max(std::min(cfg.panel_fraction * s.mean_frequency, 0.5 * s.width), s.mean_frequency / 64.0);
}

// exp(-S) sum_{n>=1} S^n/n! Gamma(2n, wc) density.
class CubicZeroTemperatureKernel final : public VibrationalKernel {
public:
    CubicZeroTemperatureKernel(const CubicExponential& c, const KernelScales& s, const QuadratureConfig& cfg)
        : cutoff_(c.cutoff), delta_weight_(std::exp(-c.huang_rhys)) {
        set_window(lower_, upper_, panel_width_, s, 0.0, cfg);
        const double S = c.huang_rhys;
        const double log_S = std::log(S);
        // Keep Poisson weights within exp(-60) of the peak.
        const int peak = std::max(1, static_cast<int>(S));
        auto log_poisson = [&](int n) { return n * log_S - S - std::lgamma(n + 1.0); };
        const double log_peak = log_poisson(peak);
        first_ = peak;
        while (first_ > 1 && log_poisson(first_ - 1) > log_peak - 60.0) --first_;
        int last = peak;
        while (log_poisson(last + 1) > log_peak - 60.0) ++last;
        for (int n = first_; n <= last; ++n)
            log_coefficient_.push_back(log_poisson(n) - std::lgamma(2.0 * n) - 2.0 * n * std::log(cutoff_));
    }

    double delta_weight() const override { return delta_weight_; }

    double smooth(double eps) const override {
        if (!(eps > 0.0)) return 0.0;
        const double log_eps = std::log(eps), decay = eps / cutoff_;
        double sum = 0.0;
        for (std::size_t i = 0; i < log_coefficient_.size(); ++i) {
            const int n = first_ + static_cast<int>(i);
            sum += std::exp(log_coefficient_[i] + (2.0 * n - 1.0) * log_eps - decay);
        }
        return sum;
    }

private:
    double cutoff_;
    double delta_weight_;
    int first_{1};
    std::vector<double> log_coefficient_;
};

// Generic kernel: analytic one-phonon density plus a Filon transform of
// R(t) = exp(phi) - 1 - phi on [0, T_max].
class NumericalKernel final : public VibrationalKernel {
public:
    NumericalKernel(const SpectralDensity& sd, double temperature, const KernelScales& s, const QuadratureConfig& cfg)
        : sd_(sd), temperature_(temperature), phi_zero_(s.phi_zero) {
        set_window(lower_, upper_, panel_width_, s, temperature, cfg);
        delta_weight_ = std::exp(-phi_zero_);
        step_ = cfg.time_step_factor / std::max(s.mean_frequency, std::abs(s.reorganisation) + 3.0 * s.width);

        const PropagatorSampler sampler(sd, temperature, cfg);
        auto certificate = [&]() {
            // Largest |exp(-phi0) R| over the last tenth of the grid.
            double worst = 0.0;
            const std::size_t n = remainder_re_.size();
            for (std::size_t k = n - std::max<std::size_t>(1, n / 10); k < n; ++k)
                worst = std::max(worst, delta_weight_ * std::hypot(remainder_re_[k], remainder_im_[k]));
            return worst;
        };
        std::size_t count = static_cast<std::size_t>(std::ceil(40.0 / s.mean_frequency / step_)) | 1u;
        for (;;) {
            for (std::size_t k = remainder_re_.size(); k < count; ++k) {
                const cplx phi = sampler(static_cast<double>(k) * step_);
                const cplx r = std::exp(phi) - 1.0 - phi;
                remainder_re_.push_back(r.real());
                remainder_im_.push_back(r.imag());
            }
            tail_certificate_ = certificate();
            if (tail_certificate_ < cfg.tail_tolerance) break;
            if (2 * count > cfg.max_time_samples) {
                converged_ = false;
                break;
            }
            count = (2 * count) | 1u;
        }
    }

    double delta_weight() const override { return delta_weight_; }

    double smooth(double eps) const override {
        double one_phonon = 0.0;
        if (eps != 0.0) {
            const double w = std::abs(eps);
            const double n = bose_occupation(w, temperature_);
            one_phonon = evaluate_jv(sd_, w) / (w * w) * (eps > 0.0 ? n + 1.0 : n);
        }
        const auto [c, s_unused] = filon_cos_sin(remainder_re_, 0.0, step_, eps);
        const auto [c_unused, s] = filon_cos_sin(remainder_im_, 0.0, step_, eps);
        (void)s_unused;
        (void)c_unused;
        return delta_weight_ * (one_phonon + (c - s) / kPi);
    }

private:
    const SpectralDensity sd_;
    double temperature_;
    double phi_zero_;
    double delta_weight_{1.0};
    double step_{0.0};
    std::vector<double> remainder_re_;
    std::vector<double> remainder_im_;
};

// Composite Gauss-Legendre nodes over the kernel window, split at breaks.
struct EnergyRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

EnergyRule energy_rule(const VibrationalKernel& kernel, std::vector<double> breaks) {
    breaks.push_back(kernel.lower());
    breaks.push_back(kernel.upper());
    breaks.push_back(0.0);
    std::erase_if(breaks, [&](double b) { return b < kernel.lower() || b > kernel.upper(); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    EnergyRule rule;
    const auto& x = GaussRule::abscissa();
    const auto& w = GaussRule::weights();
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double a = breaks[i - 1], b = breaks[i];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / kernel.panel_width())));
        const double h = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double mid = a + (p + 0.5) * h, half = 0.5 * h;
            for (std::size_t j = 0; j < x.size(); ++j) {
                rule.nodes.push_back(mid - half * x[j]);
                rule.weights.push_back(half * w[j]);
                rule.nodes.push_back(mid + half * x[j]);
                rule.weights.push_back(half * w[j]);
            }
        }
    }
    return rule;
}

// gamma(eta) split by channel, with the flat convention for flat baths.
RateComponents kernel_rate(double eta, const VibrationalKernel& kernel, const EnergyRule& rule,
                           const std::vector<double>& values, double smooth_mass, const OpticalBath& ob) {
    RateComponents out;
    if (ob.is_flat()) {
        const double mass = kernel.delta_weight() + smooth_mass;
        out.emission = mass * emission_density(ob, eta);
        out.absorption = mass * absorption_density(ob, -eta);
    } else {
        out.emission = kernel.delta_weight() * emission_density(ob, eta);
        out.absorption = kernel.delta_weight() * absorption_density(ob, -eta);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double eps = rule.nodes[i], kw = rule.weights[i] * values[i];
            out.emission += kw * emission_density(ob, eta - eps);
            out.absorption += kw * absorption_density(ob, eps - eta);
        }
    }
    out.total = out.emission + out.absorption;
    return out;
}

void validate_temperature(double temperature) {
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        throw InvalidArgument("vibrational temperature must be finite and >= 0");
}

}  // namespace

cplx phonon_propagator(const SpectralDensity& sd, double temperature, double t, const QuadratureConfig& cfg) {
    validate_temperature(temperature);
    if (const auto* d = std::get_if<DiscreteModes>(&sd.family())) return discrete_propagator(*d, temperature, t);
    if (const auto* c = std::get_if<CubicExponential>(&sd.family()); c && cfg.use_closed_forms)
        return cubic_propagator(*c, temperature, t);
    require_decaying(sd);
    if (reorganisation_energy(sd) == 0.0) return 0.0;
    return quadrature_propagator(sd, temperature, t, cfg.relative_tolerance);
}

PropagatorSamples sample_propagator(const SpectralDensity& sd, double temperature, double time_step,
                                    std::size_t count, const QuadratureConfig& cfg) {
    validate_temperature(temperature);
    if (!(time_step > 0.0) || count == 0) throw InvalidArgument("sample_propagator needs time_step > 0 and count > 0");
    const PropagatorSampler sampler(sd, temperature, cfg);
    PropagatorSamples out;
    out.time_step = time_step;
    out.values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.values.push_back(sampler(static_cast<double>(k) * time_step));
    out.values.front().imag(0.0);
    out.phi_zero = out.values.front().real();
    out.tail_certificate = std::abs(std::exp(out.values.back() - out.phi_zero) - std::exp(-out.phi_zero));
    return out;
}

std::unique_ptr<VibrationalKernel> make_kernel(const SpectralDensity& sd, double temperature,
                                               const QuadratureConfig& cfg) {
    validate_temperature(temperature);
    require_decaying(sd);
    if (!(reorganisation_energy(sd) > 0.0)) throw InvalidArgument("oracle kernel needs a coupled bath (lambda > 0)");
    const auto scales = kernel_scales(sd, temperature, cfg);
    if (const auto* c = std::get_if<CubicExponential>(&sd.family()); c && cfg.use_closed_forms && temperature == 0.0)
        return std::make_unique<CubicZeroTemperatureKernel>(*c, scales, cfg);
    return std::make_unique<NumericalKernel>(sd, temperature, scales, cfg);
}

KernelValue k_function(const SpectralDensity& sd, double temperature, double eps, const QuadratureConfig& cfg) {
    const auto kernel = make_kernel(sd, temperature, cfg);
    return {kernel->delta_weight(), kernel->smooth(eps)};
}

double smooth_kernel_mass(const VibrationalKernel& kernel) {
    const auto rule = energy_rule(kernel, {});
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) mass += rule.weights[i] * kernel.smooth(rule.nodes[i]);
    return mass;
}

double prf_numerical(double eta, const SpectralDensity& sd, const OpticalBath& ob, double temperature,
                     const QuadratureConfig& cfg) {
    const auto kernel = make_kernel(sd, temperature, cfg);
    const auto rule = energy_rule(*kernel, {eta});
    std::vector<double> values;
    values.reserve(rule.nodes.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        values.push_back(kernel->smooth(rule.nodes[i]));
        mass += rule.weights[i] * values.back();
    }
    return kernel_rate(eta, *kernel, rule, values, mass, ob).total;
}

OracleResult oracle_rates(double polaron_energy, const SpectralDensity& sd, const OpticalBath& ob,
                          double temperature, const QuadratureConfig& cfg) {
    if (!std::isfinite(polaron_energy)) throw InvalidArgument("polaron energy must be finite");
    const auto kernel = make_kernel(sd, temperature, cfg);
    const auto rule = energy_rule(*kernel, {polaron_energy, -polaron_energy});
    std::vector<double> values;
    values.reserve(rule.nodes.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        values.push_back(kernel->smooth(rule.nodes[i]));
        mass += rule.weights[i] * values.back();
    }

    OracleResult out;
    out.delta_weight = kernel->delta_weight();
    out.smooth_mass = mass;
    out.converged = kernel->converged();
    out.rates.polaron_energy = polaron_energy;
    out.rates.up = kernel_rate(-polaron_energy, *kernel, rule, values, mass, ob);
    out.rates.down = kernel_rate(polaron_energy, *kernel, rule, values, mass, ob);
    out.rates.mass_deficit = 1.0 - out.delta_weight - mass;
    if (!out.converged) {
        std::ostringstream msg;
        msg << "time-domain tail certificate " << kernel->tail_certificate() << " not reached within "
            << cfg.max_time_samples << " samples";
        out.rates.warnings.push_back(msg.str());
    }
    return out;
}

}  // namespace polaron
