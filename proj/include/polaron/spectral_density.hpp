// spectral_density.hpp - Vibrational spectral densities J_V(w) and their moments
//
// The weighted moments mu_j = int dw J_V(w) w^(j-2) are the only bath data the
// truncated-mode rate expression needs. Closed forms are used for the analytic
// families; tabulated densities are integrated exactly on their interpolant
// and checked for an unresolved tail.

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace polaron {

// J(w) = S w^3 / wc^2 exp(-w / wc). S is the bath Huang-Rhys parameter.
struct CubicExponential {
    double huang_rhys{1.0};
    double cutoff{0.2};
};

// J(w) = lambda 2/(sqrt(pi) wc) w exp(-(w/wc)^2)
struct GaussianOhmic {
    double reorganisation{0.01};
    double cutoff{0.2};
};

// J(w) = lambda exp(-1/4)/(sqrt(pi) wc) w exp(-ln^2(w/wc))
struct LogNormalOhmic {
    double reorganisation{0.01};
    double cutoff{0.2};
};

struct DiscreteMode {
    double huang_rhys{0.0};
    double frequency{0.0};
};

// Sum of delta peaks, J(w) = sum_i S_i w_i^2 delta(w - w_i).
struct DiscreteModes {
    std::vector<DiscreteMode> modes;
};

// Linear interpolation between samples, hard zero outside [front, back].
struct Tabulated {
    std::vector<double> frequency;
    std::vector<double> value;
};

struct MomentOptions {
    // A tabulated density must have decayed by its last sample: the tail
    // estimate w_N^(j-1) J(w_N) may not exceed this fraction of mu_j.
    double tabulated_tail_tolerance{1e-10};
};

class SpectralDensity {
public:
    using Family = std::variant<CubicExponential, GaussianOhmic, LogNormalOhmic, DiscreteModes, Tabulated>;

    // Named constructors validate their arguments and throw InvalidArgument.
    static SpectralDensity cubic_exponential(double huang_rhys, double cutoff);
    static SpectralDensity gaussian_ohmic(double reorganisation, double cutoff);
    static SpectralDensity log_normal_ohmic(double reorganisation, double cutoff);
    static SpectralDensity discrete(std::vector<DiscreteMode> modes);
    static SpectralDensity tabulated(std::vector<double> frequency, std::vector<double> value);

    explicit SpectralDensity(Family family);

    const Family& family() const noexcept { return family_; }
    std::string name() const;

    // Scaled copy c * J(w); c > 0.
    SpectralDensity scaled(double factor) const;

    template <class T>
    bool holds() const noexcept {
        return std::holds_alternative<T>(family_);
    }

private:
    Family family_;
};

// Pointwise J_V(w); 0 for w <= 0. Throws InvalidArgument for discrete modes.
double evaluate_jv(const SpectralDensity& sd, double frequency);

// mu_j for j >= 1. Throws DivergentMoment if the moment does not exist.
double weighted_moment(const SpectralDensity& sd, int order, const MomentOptions& opts = {});

// lambda = mu_1
double reorganisation_energy(const SpectralDensity& sd, const MomentOptions& opts = {});

// A_V = mu_2 = int dw J_V(w)
double spectral_area(const SpectralDensity& sd, const MomentOptions& opts = {});

// Smallest frequency beyond which w^(order-1) J(w) stays below rel_tol * mu_order,
// found by doubling from the single-mode frequency. Discrete modes return the
// largest mode frequency; tabulated densities the last grid point.
double frequency_cutoff(const SpectralDensity& sd, int order, double rel_tol = 1e-14);

}  // namespace polaron
