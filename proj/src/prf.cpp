// prf.cpp - Sideband combination and polaron-frame rates

#include "polaron/prf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "polaron/errors.hpp"

namespace polaron {

namespace {

// Merge lines whose offsets agree within tol (input sorted by offset).
std::vector<SidebandLine> merge_sorted(std::vector<SidebandLine> lines, double tol) {
    std::vector<SidebandLine> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        if (!out.empty() && line.offset - out.back().offset <= tol) {
            out.back().weight += line.weight;
            continue;
        }
        out.push_back(line);
    }
    return out;
}

// Remove lines below threshold * peak, smallest first, without letting the
// removed mass exceed budget.
std::vector<SidebandLine> prune(std::vector<SidebandLine> lines, double threshold, double budget) {
    if (lines.empty()) return lines;
    const double peak =
        std::max_element(lines.begin(), lines.end(), [](auto& a, auto& b) { return a.weight < b.weight; })->weight;
    const double cut = threshold * peak;
    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lines[a].weight < lines[b].weight; });
    std::vector<char> keep(lines.size(), 1);
    double dropped = 0.0;
    for (auto idx : order) {
        const double w = lines[idx].weight;
        if (w >= cut || dropped + w > budget) break;
        dropped += w;
        keep[idx] = 0;
    }
    std::vector<SidebandLine> out;
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (keep[i]) out.push_back(lines[i]);
    return out;
}

double kahan_total(const std::vector<SidebandLine>& lines) {
    double sum = 0.0, c = 0.0;
    for (const auto& line : lines) {
        const double t = sum + line.weight;
        c += std::abs(sum) >= std::abs(line.weight) ? (sum - t) + line.weight : (line.weight - t) + sum;
        sum = t;
    }
    return sum + c;
}

}  // namespace

SidebandSpectrum sideband_spectrum(const TruncatedBath& bath, double vibrational_temperature,
                                   const SidebandOptions& opts) {
    SidebandSpectrum spectrum;
    spectrum.pruning_threshold = opts.pruning_threshold;
    spectrum.lines = {{0.0, 1.0}};
    // Same budget the amplitude tables use for their own tails.
    const double budget = opts.amplitude.tolerance * 1e-2;

    for (const auto& mode : bath.modes) {
        const auto table = amplitude_table(mode.huang_rhys, mode.frequency, vibrational_temperature, opts.amplitude);
        spectrum.series_terms = std::max(spectrum.series_terms, table.series_terms());

        const std::size_t size = spectrum.lines.size() * table.entries().size();
        if (size > opts.max_lines) {
            std::ostringstream msg;
            msg << "sideband comb would need " << size << " lines (limit " << opts.max_lines
                << "); reduce N*, S or T_V";
            throw TruncationFailure(msg.str());
        }
        std::vector<SidebandLine> folded;
        folded.reserve(size);
        for (const auto& line : spectrum.lines)
            for (const auto& entry : table.entries())
                folded.push_back({line.offset + entry.l * mode.frequency, line.weight * entry.value});
        std::sort(folded.begin(), folded.end(), [](auto& a, auto& b) { return a.offset < b.offset; });
        spectrum.lines = prune(merge_sorted(std::move(folded), opts.merge_tolerance), opts.pruning_threshold, budget);
    }
    spectrum.mass_deficit = 1.0 - kahan_total(spectrum.lines);
    return spectrum;
}

RateComponents polaron_rate(double eta, const SidebandSpectrum& spectrum, const OpticalBath& ob) {
    RateComponents out;
    if (ob.is_flat()) {
        const double total_weight = kahan_total(spectrum.lines);
        out.emission = total_weight * emission_density(ob, eta);
        out.absorption = total_weight * absorption_density(ob, -eta);
    } else {
        for (const auto& line : spectrum.lines) {
            out.emission += line.weight * emission_density(ob, eta - line.offset);
            out.absorption += line.weight * absorption_density(ob, line.offset - eta);
        }
    }
    out.total = out.emission + out.absorption;
    return out;
}

double prf(double eta, const TruncatedBath& bath, const OpticalBath& ob, double vibrational_temperature,
           const SidebandOptions& opts) {
    return polaron_rate(eta, sideband_spectrum(bath, vibrational_temperature, opts), ob).total;
}

RateResult rates(double polaron_energy, const TruncatedBath& bath, const OpticalBath& ob,
                 double vibrational_temperature, const SidebandOptions& opts) {
    if (!std::isfinite(polaron_energy)) throw InvalidArgument("polaron energy must be finite");
    const auto spectrum = sideband_spectrum(bath, vibrational_temperature, opts);
    RateResult result;
    result.polaron_energy = polaron_energy;
    result.bath = bath;
    result.up = polaron_rate(-polaron_energy, spectrum, ob);
    result.down = polaron_rate(polaron_energy, spectrum, ob);
    result.mass_deficit = spectrum.mass_deficit;
    result.series_terms = spectrum.series_terms;
    if (!(polaron_energy > 0.0)) {
        std::ostringstream msg;
        msg << "polaron energy delta' = " << polaron_energy << " eV is not positive";
        result.warnings.push_back(msg.str());
    }
    return result;
}

RateResult rates(SystemEnergy energy, const SpectralDensity& sd, const OpticalBath& ob,
                 double vibrational_temperature, const RateOptions& opts) {
    double delta_prime = energy.value;
    if (energy.kind == SystemEnergy::Kind::Bare) delta_prime = energy.value - reorganisation_energy(sd, opts.moments);
    const auto bath = truncate(sd, opts.n_modes, opts.expansion, opts.moments);
    return rates(delta_prime, bath, ob, vibrational_temperature, opts.sideband);
}

ConvergedRates converged_rates(SystemEnergy energy, const SpectralDensity& sd, const OpticalBath& ob,
                               double vibrational_temperature, double tolerance, RateOptions opts) {
    if (!(tolerance > 0.0)) throw InvalidArgument("convergence tolerance must be positive");
    if (opts.n_modes < 1 || opts.n_modes > kMaxModes) throw InvalidArgument("starting N* out of range");
    auto relative_change = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
    };
    ConvergedRates out;
    out.n_modes = opts.n_modes;
    out.result = rates(energy, sd, ob, vibrational_temperature, opts);
    out.change = std::numeric_limits<double>::infinity();
    while (out.n_modes < kMaxModes) {
        opts.n_modes = out.n_modes + 1;
        RateResult next;
        try {
            next = rates(energy, sd, ob, vibrational_temperature, opts);
        } catch (const TruncationFailure& e) {
            out.result.warnings.push_back(std::string("N* loop stopped: ") + e.what());
            return out;
        }
        out.change = std::max(relative_change(next.up.total, out.result.up.total),
                              relative_change(next.down.total, out.result.down.total));
        out.result = std::move(next);
        out.n_modes = opts.n_modes;
        if (out.change < tolerance) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

RateResult weak_limit_rates(double delta, const OpticalBath& ob) {
    // gamma(eta) = J_E(eta) + J_A(-eta); one of the two vanishes for each sign of eta.
    auto bare = [&](double eta) {
        RateComponents c;
        c.emission = emission_density(ob, eta);
        c.absorption = absorption_density(ob, -eta);
        c.total = c.emission + c.absorption;
        return c;
    };
    RateResult result;
    result.polaron_energy = delta;
    result.up = bare(-delta);
    result.down = bare(delta);
    return result;
}

RateResult flat_limit_rates(double polaron_energy, const OpticalBath& ob) {
    return weak_limit_rates(polaron_energy, ob);
}

double steady_state(const RateResult& r) {
    const double sum = r.up.total + r.down.total;
    if (!(sum > 0.0)) throw DegenerateRates("steady state undefined: gamma_up + gamma_down = 0");
    return r.up.total / sum;
}

std::vector<double> population_dynamics(const RateResult& r, double initial_excited, std::span<const double> times) {
    if (!(initial_excited >= 0.0 && initial_excited <= 1.0))
        throw InvalidArgument("initial excited population must lie in [0, 1]");
    const double total = r.up.total + r.down.total;
    std::vector<double> trajectory;
    trajectory.reserve(times.size());
    if (!(total > 0.0)) {
        trajectory.assign(times.size(), initial_excited);
        return trajectory;
    }
    const double rho_ss = r.up.total / total;
    for (double t : times) trajectory.push_back(rho_ss + (initial_excited - rho_ss) * std::exp(-total * t));
    return trajectory;
}

}  // namespace polaron
