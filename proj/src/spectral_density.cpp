// spectral_density.cpp - Vibrational spectral densities and weighted moments

#include "polaron/spectral_density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polaron/errors.hpp"
#include "polaron/units.hpp"

namespace polaron {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool condition, const char* message) {
    if (!condition) throw InvalidArgument(message);
}

bool finite_non_negative(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

double tabulated_value(const Tabulated& tab, double w) {
    const auto& x = tab.frequency;
    if (w <= 0.0 || w < x.front() || w > x.back()) return 0.0;
    auto hi = std::upper_bound(x.begin(), x.end(), w);
    if (hi == x.end()) return tab.value.back();
    const auto i = static_cast<std::size_t>(hi - x.begin());
    const double t = (w - x[i - 1]) / (x[i] - x[i - 1]);
    return tab.value[i - 1] + t * (tab.value[i] - tab.value[i - 1]);
}

// Exact integral of the piecewise-linear interpolant times w^(order-2).
double tabulated_moment(const Tabulated& tab, int order, const MomentOptions& opts) {
    const int p = order - 2;
    const auto& x = tab.frequency;
    const auto& y = tab.value;
    double sum = 0.0;
    double compensation = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double x0 = x[i], x1 = x[i + 1];
        const double slope = (y[i + 1] - y[i]) / (x1 - x0);
        const double intercept = y[i] - slope * x0;
        double piece = 0.0;
        if (p == -1) {
            if (x0 == 0.0) {
                if (intercept != 0.0)
                    throw DivergentMoment("weighted moment mu_1 diverges: tabulated J(0) > 0 gives a 1/w singularity");
                piece = slope * x1;
            } else {
                piece = intercept * std::log(x1 / x0) + slope * (x1 - x0);
            }
        } else {
            piece = intercept * (std::pow(x1, p + 1) - std::pow(x0, p + 1)) / (p + 1) +
                    slope * (std::pow(x1, p + 2) - std::pow(x0, p + 2)) / (p + 2);
        }
        const double t = sum + piece;
        compensation += std::abs(sum) >= std::abs(piece) ? (sum - t) + piece : (piece - t) + sum;
        sum = t;
    }
    sum += compensation;

    const double tail = std::pow(x.back(), order - 1) * y.back();
    if (tail > opts.tabulated_tail_tolerance * sum || !std::isfinite(sum)) {
        std::ostringstream msg;
        msg << "weighted moment mu_" << order << " does not converge: tabulated density has not decayed at w = "
            << x.back() << " (tail estimate " << tail << " vs accumulated " << sum << ")";
        throw DivergentMoment(msg.str());
    }
    return sum;
}

}  // namespace

SpectralDensity::SpectralDensity(Family family) : family_(std::move(family)) {
    std::visit(overloaded{
                   [](const CubicExponential& f) {
                       require(finite_non_negative(f.huang_rhys), "cubic_exponential: S must be >= 0");
                       require(finite_positive(f.cutoff), "cubic_exponential: omega_c must be > 0");
                   },
                   [](const GaussianOhmic& f) {
                       require(finite_non_negative(f.reorganisation), "gaussian: lambda must be >= 0");
                       require(finite_positive(f.cutoff), "gaussian: omega_c must be > 0");
                   },
                   [](const LogNormalOhmic& f) {
                       require(finite_non_negative(f.reorganisation), "log_normal: lambda must be >= 0");
                       require(finite_positive(f.cutoff), "log_normal: omega_c must be > 0");
                   },
                   [](const DiscreteModes& f) {
                       for (const auto& m : f.modes) {
                           require(finite_non_negative(m.huang_rhys), "discrete: S_i must be >= 0");
                           require(finite_positive(m.frequency), "discrete: omega_i must be > 0");
                       }
                   },
                   [](const Tabulated& f) {
                       require(f.frequency.size() == f.value.size(), "tabulated: grid and values differ in length");
                       require(f.frequency.size() >= 2, "tabulated: need at least two samples");
                       require(finite_non_negative(f.frequency.front()), "tabulated: frequencies must be >= 0");
                       for (std::size_t i = 0; i < f.frequency.size(); ++i) {
                           require(finite_non_negative(f.value[i]), "tabulated: J must be finite and >= 0");
                           if (i > 0)
                               require(std::isfinite(f.frequency[i]) && f.frequency[i] > f.frequency[i - 1],
                                       "tabulated: frequencies must be strictly increasing");
                       }
                   },
               },
               family_);
}

SpectralDensity SpectralDensity::cubic_exponential(double huang_rhys, double cutoff) {
    return SpectralDensity(CubicExponential{huang_rhys, cutoff});
}

SpectralDensity SpectralDensity::gaussian_ohmic(double reorganisation, double cutoff) {
    return SpectralDensity(GaussianOhmic{reorganisation, cutoff});
}

SpectralDensity SpectralDensity::log_normal_ohmic(double reorganisation, double cutoff) {
    return SpectralDensity(LogNormalOhmic{reorganisation, cutoff});
}

SpectralDensity SpectralDensity::discrete(std::vector<DiscreteMode> modes) {
    return SpectralDensity(DiscreteModes{std::move(modes)});
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> frequency, std::vector<double> value) {
    return SpectralDensity(Tabulated{std::move(frequency), std::move(value)});
}

std::string SpectralDensity::name() const {
    return std::visit(overloaded{
                          [](const CubicExponential&) { return std::string("cubic_exponential"); },
                          [](const GaussianOhmic&) { return std::string("gaussian"); },
                          [](const LogNormalOhmic&) { return std::string("log_normal"); },
                          [](const DiscreteModes&) { return std::string("discrete"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      family_);
}

SpectralDensity SpectralDensity::scaled(double factor) const {
    require(finite_positive(factor), "scale factor must be > 0");
    return std::visit(overloaded{
                          [&](CubicExponential f) {
                              f.huang_rhys *= factor;
                              return SpectralDensity(f);
                          },
                          [&](GaussianOhmic f) {
                              f.reorganisation *= factor;
                              return SpectralDensity(f);
                          },
                          [&](LogNormalOhmic f) {
                              f.reorganisation *= factor;
                              return SpectralDensity(f);
                          },
                          [&](DiscreteModes f) {
                              for (auto& m : f.modes) m.huang_rhys *= factor;
                              return SpectralDensity(std::move(f));
                          },
                          [&](Tabulated f) {
                              for (auto& v : f.value) v *= factor;
                              return SpectralDensity(std::move(f));
                          },
                      },
                      family_);
}

double evaluate_jv(const SpectralDensity& sd, double w) {
    if (sd.holds<DiscreteModes>()) throw InvalidArgument("discrete density has no pointwise value");
    if (!(w > 0.0)) return 0.0;
    return std::visit(overloaded{
                          [&](const CubicExponential& f) {
                              const double x = w / f.cutoff;
                              return f.huang_rhys * w * x * x * std::exp(-x);
                          },
                          [&](const GaussianOhmic& f) {
                              const double x = w / f.cutoff;
                              return f.reorganisation * 2.0 / (std::sqrt(kPi) * f.cutoff) * w * std::exp(-x * x);
                          },
                          [&](const LogNormalOhmic& f) {
                              const double l = std::log(w / f.cutoff);
                              return f.reorganisation * std::exp(-0.25) / (std::sqrt(kPi) * f.cutoff) * w *
                                     std::exp(-l * l);
                          },
                          [](const DiscreteModes&) { return 0.0; },
                          [&](const Tabulated& f) { return tabulated_value(f, w); },
                      },
                      sd.family());
}

double weighted_moment(const SpectralDensity& sd, int order, const MomentOptions& opts) {
    if (order < 1) throw InvalidArgument("weighted moment order must be >= 1");
    const double j = order;
    return std::visit(overloaded{
                          [&](const CubicExponential& f) {
                              return f.huang_rhys * std::pow(f.cutoff, j) * std::tgamma(j + 2.0);
                          },
                          [&](const GaussianOhmic& f) {
                              return f.reorganisation * std::pow(f.cutoff, j - 1.0) * std::tgamma(0.5 * j) /
                                     std::sqrt(kPi);
                          },
                          [&](const LogNormalOhmic& f) {
                              return f.reorganisation * std::pow(f.cutoff, j - 1.0) * std::exp(0.25 * (j * j - 1.0));
                          },
                          [&](const DiscreteModes& f) {
                              double sum = 0.0;
                              for (const auto& m : f.modes) sum += m.huang_rhys * std::pow(m.frequency, j);
                              return sum;
                          },
                          [&](const Tabulated& f) { return tabulated_moment(f, order, opts); },
                      },
                      sd.family());
}

double reorganisation_energy(const SpectralDensity& sd, const MomentOptions& opts) {
    return weighted_moment(sd, 1, opts);
}

double spectral_area(const SpectralDensity& sd, const MomentOptions& opts) { return weighted_moment(sd, 2, opts); }

double frequency_cutoff(const SpectralDensity& sd, int order, double rel_tol) {
    if (const auto* d = std::get_if<DiscreteModes>(&sd.family())) {
        double w = 0.0;
        for (const auto& m : d->modes) w = std::max(w, m.frequency);
        return w;
    }
    if (const auto* t = std::get_if<Tabulated>(&sd.family())) return t->frequency.back();

    const double mu1 = weighted_moment(sd, 1);
    const double mu = weighted_moment(sd, order);
    if (!(mu1 > 0.0)) return 0.0;
    double omega = weighted_moment(sd, 2) / mu1;
    for (int iter = 0; iter < 200; ++iter) {
        const double tail = evaluate_jv(sd, omega) * std::pow(omega, order - 1);
        if (tail < rel_tol * mu) return omega;
        omega *= 1.25;
    }
    throw DivergentMoment("spectral density tail does not decay");
}

}  // namespace polaron
