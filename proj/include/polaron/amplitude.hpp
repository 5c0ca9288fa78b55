// amplitude.hpp - Thermal Franck-Condon amplitudes A_l(S, w)
//
// A_l is the weight of an optical transition accompanied by a net change of l
// phonons in a single displaced mode:
//
//   A_l = sum_{n=|l|, |l|+2, ...} sum_{m=(n-l)/2}^{n} C(n,m) C(m, m-(n-l)/2) W_n(S) V_m(S,w)
//   W_n(S)   = S^n exp(-S) / n!
//   V_m(S,w) = N_w^m exp(-2 S N_w)
//
// Each shell n carries total weight Poisson(n; S(1+2N_w)) and, inside a shell,
// the thermal order m is Binomial(n, 2N/(1+2N)) distributed. Both facts give
// rigorous bounds for the truncation of the n and m sums.

#pragma once

#include <utility>
#include <vector>

namespace polaron {

inline constexpr double kArgmaxTieTolerance = 1e-13;

struct AmplitudeOptions {
    double tolerance{1e-10};  // table mass deficit bound
    int max_terms{512};       // hard cap on the series order n
};

class AmplitudeTable {
public:
    struct Entry {
        int l;
        double value;
    };

    AmplitudeTable(double huang_rhys, double frequency, double temperature, std::vector<Entry> entries, int series_terms,
                   int thermal_cutoff, double mass_deficit);

    double huang_rhys() const noexcept { return huang_rhys_; }
    double frequency() const noexcept { return frequency_; }
    double temperature() const noexcept { return temperature_; }

    // Entries ascending in l; absent l have A_l below the pruning threshold.
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    int min_l() const noexcept { return entries_.front().l; }
    int max_l() const noexcept { return entries_.back().l; }

    // A_l, 0 for l not stored.
    double operator[](int l) const;

    int series_terms() const noexcept { return series_terms_; }    // n_max used
    int thermal_cutoff() const noexcept { return thermal_cutoff_; }  // largest m used
    double mass_deficit() const noexcept { return mass_deficit_; }   // 1 - sum_l A_l

    // Largest l whose A_l is within kArgmaxTieTolerance of the maximum.
    int argmax() const;

private:
    double huang_rhys_;
    double frequency_;
    double temperature_;
    std::vector<Entry> entries_;
    int series_terms_;
    int thermal_cutoff_;
    double mass_deficit_;
};

AmplitudeTable amplitude_table(double huang_rhys, double frequency, double temperature,
                               const AmplitudeOptions& opts = {});

// Zero-temperature limit: exp(-S) S^l / l! for l >= 0, 0 otherwise.
double poisson_limit(double huang_rhys, int l);

}  // namespace polaron
