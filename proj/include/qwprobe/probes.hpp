// probes.hpp
// Initial walker states. All constructors return normalized states.

#pragma once

#include "coinspace.hpp"
#include "errors.hpp"
#include "state.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace qwprobe {

namespace detail {

inline void require_unit(const coin_vector& c, const char* who) {
    if (c.size() == 0) throw invalid_dimension(std::string(who) + ": empty coin state");
    if (std::abs(c.squaredNorm() - 1.0) > 1e-10)
        throw not_normalized(std::string(who) + ": coin state is not normalized");
}

inline void require_site(std::size_t x, std::size_t n) {
    if (x >= n)
        throw index_out_of_range("site " + std::to_string(x) + " outside ring of " +
                                 std::to_string(n));
}

inline walker_state finish(std::size_t n, std::size_t dim, std::vector<amplitude> amps) {
    double norm2 = 0.0;
    for (const auto& a : amps) norm2 += std::norm(a);
    if (!(norm2 > 0.0)) throw not_normalized("probe has zero norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= scale;
    return walker_state(n, dim, std::move(amps), true);
}

} // namespace detail

/// alpha|-1> + e^{i gamma} sqrt(1 - alpha^2)|+1>, embedded in dimension D.
inline coin_vector two_level_coin(double alpha, double gamma, std::size_t dim = 2) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw invalid_argument("alpha must lie in [0, 1]");
    if (!std::isfinite(gamma)) throw non_finite_parameter("gamma must be finite");
    coin_vector c = coin_vector::Zero(static_cast<Eigen::Index>(dim));
    c(static_cast<Eigen::Index>(coin_index(-1, dim))) = alpha;
    c(static_cast<Eigen::Index>(coin_index(+1, dim))) =
        std::polar(std::sqrt(std::max(0.0, 1.0 - alpha * alpha)), gamma);
    return c;
}

/// Coin basis vector for coin index j.
inline coin_vector basis_coin(std::size_t j, std::size_t dim) {
    detail::require_dim(dim);
    if (j >= dim) throw label_out_of_range("coin index out of range");
    coin_vector c = coin_vector::Zero(static_cast<Eigen::Index>(dim));
    c(static_cast<Eigen::Index>(j)) = 1.0;
    return c;
}

inline walker_state localized_probe(std::size_t x0, const coin_vector& coin, std::size_t n) {
    detail::require_unit(coin, "localized_probe");
    detail::require_site(x0, n);
    const auto dim = static_cast<std::size_t>(coin.size());
    std::vector<amplitude> amps(n * dim);
    for (std::size_t j = 0; j < dim; ++j) amps[x0 * dim + j] = coin(static_cast<Eigen::Index>(j));
    return walker_state(n, dim, std::move(amps), true);
}

inline walker_state localized_probe(std::size_t x0, double alpha, double gamma, std::size_t n,
                                    std::size_t dim = 2) {
    return localized_probe(x0, two_level_coin(alpha, gamma, dim), n);
}

/// Envelope exp(-d^2 / (2 sigma^2)) with d the ring distance to x0, so the
/// profile is symmetric under x -> 2 x0 - x (mod N). Normalized by the
/// explicit lattice sum.
inline std::vector<double> gaussian_envelope(std::size_t x0, double sigma, std::size_t n) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw invalid_sigma("sigma must be positive and finite");
    detail::require_site(x0, n);
    std::vector<double> env(n);
    double norm2 = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const std::size_t fwd = x >= x0 ? x - x0 : x0 - x;
        const auto d = static_cast<double>(std::min(fwd, n - fwd));
        env[x] = std::exp(-d * d / (2.0 * sigma * sigma));
        norm2 += env[x] * env[x];
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& e : env) e *= scale;
    return env;
}

inline walker_state gaussian_probe(std::size_t x0, double sigma, const coin_vector& coin,
                                   std::size_t n) {
    detail::require_unit(coin, "gaussian_probe");
    const auto env = gaussian_envelope(x0, sigma, n);
    const auto dim = static_cast<std::size_t>(coin.size());
    std::vector<amplitude> amps(n * dim);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < dim; ++j)
            amps[x * dim + j] = env[x] * coin(static_cast<Eigen::Index>(j));
    return detail::finish(n, dim, std::move(amps));
}

/// Gaussian envelope with a different coin state on every site.
inline walker_state gaussian_probe(std::size_t x0, double sigma,
                                   const std::vector<coin_vector>& coins) {
    const std::size_t n = coins.size();
    if (n == 0) throw invalid_size("gaussian_probe: no sites");
    const auto dim = static_cast<std::size_t>(coins.front().size());
    const auto env = gaussian_envelope(x0, sigma, n);
    std::vector<amplitude> amps(n * dim);
    for (std::size_t x = 0; x < n; ++x) {
        detail::require_unit(coins[x], "gaussian_probe");
        if (static_cast<std::size_t>(coins[x].size()) != dim)
            throw dimension_mismatch("gaussian_probe: coin states differ in dimension");
        for (std::size_t j = 0; j < dim; ++j)
            amps[x * dim + j] = env[x] * coins[x](static_cast<Eigen::Index>(j));
    }
    return detail::finish(n, dim, std::move(amps));
}

inline walker_state uniform_probe(const coin_vector& coin, std::size_t n) {
    detail::require_unit(coin, "uniform_probe");
    if (n == 0) throw invalid_size("uniform_probe needs N >= 1");
    const auto dim = static_cast<std::size_t>(coin.size());
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<amplitude> amps(n * dim);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < dim; ++j)
            amps[x * dim + j] = a * coin(static_cast<Eigen::Index>(j));
    return walker_state(n, dim, std::move(amps), true);
}

/// Arbitrary sum_x |x> (x) |phi_x>; the result is rescaled to unit norm.
inline walker_state custom_probe(std::size_t n, std::size_t dim,
                                 const std::vector<std::pair<std::size_t, coin_vector>>& sites) {
    detail::require_dim(dim);
    std::vector<amplitude> amps(n * dim);
    for (const auto& [x, coin] : sites) {
        detail::require_site(x, n);
        if (static_cast<std::size_t>(coin.size()) != dim)
            throw dimension_mismatch("custom_probe: coin state has wrong dimension");
        for (std::size_t j = 0; j < dim; ++j)
            amps[x * dim + j] += coin(static_cast<Eigen::Index>(j));
    }
    return detail::finish(n, dim, std::move(amps));
}

/// (|e_min> + e^{i gamma}|e_max>)/sqrt(2) for the extremal eigenvectors of T_axis.
inline coin_vector optimal_coin_state(axis a, std::size_t dim, double gamma = 0.0) {
    const auto ext = extremal_eigenstates(a, dim);
    return (ext.e_min + std::polar(1.0, gamma) * ext.e_max) / std::numbers::sqrt2;
}

} // namespace qwprobe
