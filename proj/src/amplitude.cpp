// amplitude.cpp - Series evaluation of the thermal Franck-Condon amplitudes

#include "polaron/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polaron/errors.hpp"
#include "polaron/units.hpp"

namespace polaron {

namespace {

// Series tails are cut at this fraction of the requested tolerance.
constexpr double kSeriesSafety = 1e-2;

struct NeumaierSum {
    double sum = 0.0;
    double compensation = 0.0;
    void add(double x) {
        const double t = sum + x;
        compensation += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + compensation; }
};

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_binomial(int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

// Largest m whose inclusion leaves a Binomial(n, p) upper tail below eps.
int thermal_cutoff_for_shell(int n, double p, double eps) {
    if (p <= 0.0) return 0;
    const double log_p = std::log(p), log_q = std::log1p(-p);
    double cumulative = 0.0;
    const int mode = static_cast<int>(std::floor((n + 1) * p));
    for (int m = 0; m <= n; ++m) {
        cumulative += std::exp(log_binomial(n, m) + m * log_p + (n - m) * log_q);
        if (m >= mode && 1.0 - cumulative < eps) return m;
    }
    return n;
}

}  // namespace

AmplitudeTable::AmplitudeTable(double huang_rhys, double frequency, double temperature, std::vector<Entry> entries,
                               int series_terms, int thermal_cutoff, double mass_deficit)
    : huang_rhys_(huang_rhys),
      frequency_(frequency),
      temperature_(temperature),
      entries_(std::move(entries)),
      series_terms_(series_terms),
      thermal_cutoff_(thermal_cutoff),
      mass_deficit_(mass_deficit) {}

double AmplitudeTable::operator[](int l) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), l, [](const Entry& e, int v) { return e.l < v; });
    return it != entries_.end() && it->l == l ? it->value : 0.0;
}

int AmplitudeTable::argmax() const {
    // Integer S at T_V = 0 has the exact tie A_(S-1) = A_S, and near-zero T_V
    // splits it below double resolution; ties go to the larger l.
    const double peak = std::max_element(entries_.begin(), entries_.end(),
                                         [](const Entry& a, const Entry& b) { return a.value < b.value; })
                            ->value;
    int best = entries_.front().l;
    for (const auto& e : entries_)
        if (e.value >= peak * (1.0 - kArgmaxTieTolerance)) best = e.l;
    return best;
}

double poisson_limit(double huang_rhys, int l) {
    if (!(huang_rhys >= 0.0)) throw InvalidArgument("Huang-Rhys parameter must be >= 0");
    if (l < 0) return 0.0;
    if (huang_rhys == 0.0) return l == 0 ? 1.0 : 0.0;
    if (l <= 20) {
        double value = std::exp(-huang_rhys);
        for (int k = 1; k <= l; ++k) value *= huang_rhys / k;
        return value;
    }
    return std::exp(l * std::log(huang_rhys) - huang_rhys - log_factorial(l));
}

AmplitudeTable amplitude_table(double S, double omega, double temperature, const AmplitudeOptions& opts) {
    if (!(std::isfinite(S) && S >= 0.0)) throw InvalidArgument("amplitude_table: S must be >= 0");
    if (!(std::isfinite(omega) && omega > 0.0)) throw InvalidArgument("amplitude_table: omega must be > 0");
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        throw InvalidArgument("amplitude_table: T_V must be >= 0");
    if (!(opts.tolerance > 0.0 && opts.tolerance < 1.0))
        throw InvalidArgument("amplitude_table: tolerance must lie in (0, 1)");

    if (S == 0.0) return AmplitudeTable(S, omega, temperature, {{0, 1.0}}, 0, 0, 0.0);

    const double occupation = bose_occupation(omega, temperature);
    const double shell_mean = S * (1.0 + 2.0 * occupation);  // Poisson mean of the shell index n
    const double thermal_p = 2.0 * occupation / (1.0 + 2.0 * occupation);
    const double eps = opts.tolerance * kSeriesSafety;

    const double log_S = std::log(S);
    const double log_N = occupation > 0.0 ? std::log(occupation) : -std::numeric_limits<double>::infinity();
    const double log_V0 = -2.0 * S * occupation;

    // Index l + max_terms; |l| <= n <= max_terms.
    std::vector<NeumaierSum> sums(2 * static_cast<std::size_t>(opts.max_terms) + 1);
    const int offset = opts.max_terms;
    int thermal_cutoff = 0;
    int n = 0;
    for (;; ++n) {
        if (n > opts.max_terms) {
            std::ostringstream msg;
            msg << "amplitude series for S = " << S << ", S(1+2N) = " << shell_mean << " needs more than "
                << opts.max_terms << " terms";
            throw TruncationFailure(msg.str());
        }
        const double log_W = n * log_S - S - log_factorial(n);
        const int m_cut = occupation > 0.0 ? thermal_cutoff_for_shell(n, thermal_p, eps) : 0;
        thermal_cutoff = std::max(thermal_cutoff, m_cut);
        for (int m = 0; m <= m_cut; ++m) {
            const double log_nm = log_W + log_V0 + (m > 0 ? m * log_N : 0.0) + log_binomial(n, m);
            // k counts thermal quanta returned; l = n - 2m + 2k.
            for (int k = 0; k <= m; ++k) sums[static_cast<std::size_t>(n - 2 * m + 2 * k + offset)].add(std::exp(log_nm + log_binomial(m, k)));
        }

        // Remaining shells n+1, n+2, ... form a Poisson tail with ratio < 1
        // once past the mean.
        const double next = n + 1.0;
        if (next > shell_mean) {
            const double log_next = next * std::log(shell_mean) - shell_mean - std::lgamma(next + 1.0);
            const double ratio = shell_mean / (next + 1.0);
            if (std::exp(log_next) / (1.0 - ratio) < eps) break;
        }
    }

    std::vector<AmplitudeTable::Entry> entries;
    double peak = 0.0;
    for (int l = -n; l <= n; ++l) {
        const double v = sums[static_cast<std::size_t>(l + offset)].value();
        if (v <= 0.0) continue;
        entries.push_back({l, v});
        peak = std::max(peak, v);
    }

    // Drop negligible tail entries: every A_l >= tolerance * peak stays, and
    // the dropped mass never exceeds the series safety budget.
    const double threshold = opts.tolerance * peak;
    double dropped = 0.0;
    std::size_t lo = 0, hi = entries.size();
    while (hi - lo > 1) {
        const auto& a = entries[lo];
        const auto& b = entries[hi - 1];
        const bool take_low = a.value <= b.value;
        const double v = take_low ? a.value : b.value;
        if (v >= threshold || dropped + v > eps) break;
        dropped += v;
        take_low ? ++lo : --hi;
    }
    entries = std::vector<AmplitudeTable::Entry>(entries.begin() + static_cast<std::ptrdiff_t>(lo),
                                                 entries.begin() + static_cast<std::ptrdiff_t>(hi));

    NeumaierSum total;
    for (const auto& e : entries) total.add(e.value);
    return AmplitudeTable(S, omega, temperature, std::move(entries), n, thermal_cutoff, 1.0 - total.value());
}

}  // namespace polaron
