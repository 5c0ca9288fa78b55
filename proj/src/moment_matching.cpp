// moment_matching.cpp - Gauss-rule construction of truncated baths

#include "polaron/moment_matching.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "polaron/errors.hpp"

namespace polaron {

namespace {

using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr Real kDegenerateRecurrence = 1e-12L;
constexpr double kMergeTolerance = 1e-12;
constexpr double kResidualLimit = 1e-8;

struct Node {
    Real position;  // w (zero-T) or w^2 (infinite-T)
    Real weight;    // S w
};

// Chebyshev algorithm: recurrence coefficients of the monic orthogonal
// polynomials of a measure from its raw moments m_0..m_(2n-1). Stops early
// if the measure turns out to be supported on fewer than n points.
void recurrence_from_moments(const std::vector<Real>& m, int n, std::vector<Real>& alpha, std::vector<Real>& beta) {
    const int len = 2 * n;
    std::vector<Real> prev(len, 0.0L), cur(m.begin(), m.end()), next(len, 0.0L);
    alpha.assign(1, m[1] / m[0]);
    beta.assign(1, m[0]);
    for (int k = 1; k < n; ++k) {
        for (int l = k; l < len - k; ++l)
            next[l] = cur[l + 1] - alpha[k - 1] * cur[l] - beta[k - 1] * prev[l];
        const Real b = next[k] / cur[k - 1];
        if (!std::isfinite(static_cast<double>(b)))
            throw NonPhysicalSolution("moment sequence gives a non-finite recurrence coefficient");
        if (b < -kDegenerateRecurrence) {
            std::ostringstream msg;
            msg << "moments are not those of a positive measure (beta_" << k << " = " << static_cast<double>(b)
                << "); the truncated bath would need non-real or negative modes";
            throw NonPhysicalSolution(msg.str());
        }
        if (b <= kDegenerateRecurrence) return;  // measure has exactly k support points
        beta.push_back(b);
        alpha.push_back(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
        prev.swap(cur);
        cur.swap(next);
    }
}

std::vector<Node> gauss_nodes(const std::vector<Real>& raw, int n) {
    const Real scale = raw[1] / raw[0];
    std::vector<Real> m(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) m[k] = raw[k] / (raw[0] * std::pow(scale, static_cast<Real>(k)));

    std::vector<Real> alpha, beta;
    recurrence_from_moments(m, n, alpha, beta);
    const int size = static_cast<int>(alpha.size());

    MatrixR jacobi = MatrixR::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        jacobi(i, i) = alpha[i];
        if (i + 1 < size) jacobi(i, i + 1) = jacobi(i + 1, i) = std::sqrt(beta[i + 1]);
    }
    Eigen::SelfAdjointEigenSolver<MatrixR> eig(jacobi);
    if (eig.info() != Eigen::Success) throw NonPhysicalSolution("Jacobi matrix eigen-decomposition failed");

    std::vector<Node> nodes;
    for (int i = 0; i < size; ++i) {
        const Real v0 = eig.eigenvectors()(0, i);
        nodes.push_back({eig.eigenvalues()(i) * scale, raw[0] * v0 * v0});
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.position < b.position; });

    std::vector<Node> merged;
    for (const auto& node : nodes) {
        if (!merged.empty() &&
            std::abs(static_cast<double>(node.position - merged.back().position)) <=
                kMergeTolerance * std::abs(static_cast<double>(node.position))) {
            auto& last = merged.back();
            const Real w = last.weight + node.weight;
            if (!(w > 0.0L)) throw NonPhysicalSolution("coincident truncated modes merge to a non-positive weight");
            last.position = (last.position * last.weight + node.position * node.weight) / w;
            last.weight = w;
            continue;
        }
        merged.push_back(node);
    }
    for (const auto& node : merged) {
        if (!(node.position > 0.0L) || !(node.weight > 0.0L)) {
            std::ostringstream msg;
            msg << "moment matching gives a non-physical mode (node " << static_cast<double>(node.position)
                << ", weight " << static_cast<double>(node.weight) << ")";
            throw NonPhysicalSolution(msg.str());
        }
    }
    return merged;
}

Real relative_residuals(const std::vector<Mode>& modes, const std::vector<int>& orders,
                        std::span<const double> moments, VectorR* out) {
    Real worst = 0.0L;
    if (out) out->resize(static_cast<Eigen::Index>(orders.size()));
    for (std::size_t r = 0; r < orders.size(); ++r) {
        const int j = orders[r];
        Real sum = 0.0L;
        for (const auto& mode : modes)
            sum += static_cast<Real>(mode.huang_rhys) * std::pow(static_cast<Real>(mode.frequency), static_cast<Real>(j));
        const Real rel = sum / static_cast<Real>(moments[static_cast<std::size_t>(j - 1)]) - 1.0L;
        if (out) (*out)(static_cast<Eigen::Index>(r)) = rel;
        worst = std::max(worst, std::abs(rel));
    }
    return worst;
}

// Damped Gauss-Newton on the relative moment residuals, in relative
// coordinates S_i (1 + a_i), w_i (1 + b_i).
void polish(std::vector<Mode>& modes, const std::vector<int>& orders, std::span<const double> moments) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    const auto rows = static_cast<Eigen::Index>(orders.size());
    VectorR residual;
    Real current = relative_residuals(modes, orders, moments, &residual);
    for (int iter = 0; iter < 30 && current > 1e-17L; ++iter) {
        MatrixR jac(rows, 2 * n);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const int j = orders[static_cast<std::size_t>(r)];
            const Real mu = moments[static_cast<std::size_t>(j - 1)];
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& mode = modes[static_cast<std::size_t>(i)];
                const Real term =
                    static_cast<Real>(mode.huang_rhys) * std::pow(static_cast<Real>(mode.frequency), static_cast<Real>(j)) / mu;
                jac(r, i) = term;
                jac(r, n + i) = static_cast<Real>(j) * term;
            }
        }
        const VectorR step = jac.colPivHouseholderQr().solve(-residual);
        bool improved = false;
        Real damping = 1.0L;
        for (int halving = 0; halving < 12; ++halving, damping *= 0.5L) {
            auto trial = modes;
            for (Eigen::Index i = 0; i < n; ++i) {
                auto& mode = trial[static_cast<std::size_t>(i)];
                mode.huang_rhys = static_cast<double>(mode.huang_rhys * (1.0L + damping * step(i)));
                mode.frequency = static_cast<double>(mode.frequency * (1.0L + damping * step(n + i)));
            }
            VectorR trial_residual;
            const Real value = relative_residuals(trial, orders, moments, &trial_residual);
            if (value < current) {
                modes = std::move(trial);
                residual = std::move(trial_residual);
                current = value;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
}

}  // namespace

double TruncatedBath::moment(int order) const {
    double sum = 0.0;
    for (const auto& m : modes) sum += m.huang_rhys * std::pow(m.frequency, order);
    return sum;
}

std::vector<int> matched_orders(int n_modes, Expansion expansion) {
    std::vector<int> orders;
    for (int k = 0; k < 2 * n_modes; ++k)
        orders.push_back(expansion == Expansion::ZeroTemperature ? k + 1 : 2 * k + 1);
    return orders;
}

TruncatedBath truncate_moments(std::span<const double> moments, int n_modes, Expansion expansion) {
    if (n_modes < 1 || n_modes > kMaxModes) {
        std::ostringstream msg;
        msg << "number of truncated modes must be in 1.." << kMaxModes << ", got " << n_modes;
        throw InvalidArgument(msg.str());
    }
    const auto orders = matched_orders(n_modes, expansion);
    if (moments.size() < static_cast<std::size_t>(orders.back()))
        throw InvalidArgument("moment table too short for the requested truncation");

    TruncatedBath bath;
    bath.expansion = expansion;
    std::vector<Real> raw;
    for (int j : orders) {
        const double mu = moments[static_cast<std::size_t>(j - 1)];
        if (!std::isfinite(mu)) throw DivergentMoment("weighted moment mu_" + std::to_string(j) + " is not finite");
        raw.push_back(mu);
    }
    if (std::all_of(raw.begin(), raw.end(), [](Real v) { return v == 0.0L; })) return bath;  // uncoupled
    if (std::any_of(raw.begin(), raw.end(), [](Real v) { return !(v > 0.0L); }))
        throw NonPhysicalSolution("weighted moments must be strictly positive");

    for (const auto& node : gauss_nodes(raw, n_modes)) {
        const Real omega = expansion == Expansion::ZeroTemperature ? node.position : std::sqrt(node.position);
        bath.modes.push_back({static_cast<double>(node.weight / omega), static_cast<double>(omega)});
    }
    polish(bath.modes, orders, moments);
    std::sort(bath.modes.begin(), bath.modes.end(),
              [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
    bath.residual = static_cast<double>(relative_residuals(bath.modes, orders, moments, nullptr));
    if (!(bath.residual <= kResidualLimit)) {
        std::ostringstream msg;
        msg << "moment matching residual " << bath.residual << " exceeds " << kResidualLimit << " for N* = " << n_modes;
        throw IllConditioned(msg.str());
    }
    return bath;
}

TruncatedBath truncate(const SpectralDensity& sd, int n_modes, Expansion expansion, const MomentOptions& opts) {
    if (n_modes < 1 || n_modes > kMaxModes) return truncate_moments({}, n_modes, expansion);  // throws
    const auto orders = matched_orders(n_modes, expansion);
    std::vector<double> moments(static_cast<std::size_t>(orders.back()), 0.0);
    for (int j : orders) moments[static_cast<std::size_t>(j - 1)] = weighted_moment(sd, j, opts);
    return truncate_moments(moments, n_modes, expansion);
}

std::optional<Mode> single_mode_closed_form(double reorganisation, double area) {
    if (!(std::isfinite(reorganisation) && reorganisation >= 0.0 && std::isfinite(area) && area >= 0.0))
        throw InvalidArgument("single-mode parameters need finite lambda >= 0 and A_V >= 0");
    if (reorganisation == 0.0) return std::nullopt;
    if (area == 0.0) throw InvalidArgument("A_V must be > 0 when lambda > 0");
    return Mode{reorganisation * reorganisation / area, area / reorganisation};
}

}  // namespace polaron
