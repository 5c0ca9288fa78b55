// moment_matching.hpp - Finite-mode truncation of a continuum vibrational bath
//
// An N-mode bath {(S_i, w_i)} reproduces the weighted moments
// mu'_j = sum_i S_i w_i^j of the continuum density. Matching mu_1..mu_2N is the
// same problem as building the N-point Gauss rule of the positive measure
// J(w)/w dw (raw moments 0..2N-1), so nodes come from the Jacobi matrix of that
// measure and the weights w_i = S_i w_i from its first eigenvector components.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polaron/spectral_density.hpp"

namespace polaron {

inline constexpr int kMaxModes = 6;

enum class Expansion {
    ZeroTemperature,      // match mu_1, mu_2, ..., mu_2N
    InfiniteTemperature,  // match odd moments mu_1, mu_3, ..., mu_(4N-1)
};

struct Mode {
    double huang_rhys{0.0};
    double frequency{0.0};
};

struct TruncatedBath {
    std::vector<Mode> modes;  // ascending in frequency
    double residual{0.0};     // max relative mismatch over the matched moments
    Expansion expansion{Expansion::ZeroTemperature};

    bool empty() const noexcept { return modes.empty(); }
    std::size_t size() const noexcept { return modes.size(); }

    // sum_i S_i w_i^order
    double moment(int order) const;
};

// Moment orders an N-mode truncation matches for the given expansion.
std::vector<int> matched_orders(int n_modes, Expansion expansion);

// Truncation from an explicit moment table: moments[k] = mu_(k+1), at least up
// to the highest order in matched_orders(n_modes, expansion).
TruncatedBath truncate_moments(std::span<const double> moments, int n_modes,
                               Expansion expansion = Expansion::ZeroTemperature);

TruncatedBath truncate(const SpectralDensity& sd, int n_modes, Expansion expansion = Expansion::ZeroTemperature,
                       const MomentOptions& opts = {});

// S'_1 = lambda^2 / A_V, w'_1 = A_V / lambda. Empty when lambda == 0.
std::optional<Mode> single_mode_closed_form(double reorganisation, double area);

}  // namespace polaron
