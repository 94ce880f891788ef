// metrology.hpp
// Quantum and position-measurement Fisher information for pure walker
// states, the pure-state SLD, Cramer-Rao bounds and the closed-form
// references for line and enhanced topologies.

#pragma once

#include "coinspace.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qwprobe {

/// Sites with p(x) below this contribute nothing to the position FI.
inline constexpr double fi_probability_floor = 1e-12;

/// Largest N*D for which the dense SLD is built.
inline constexpr std::size_t max_dense_dim = 4096;

struct fisher_report {
    std::size_t t = 0;
    double theta = 0.0;
    double qfi = 0.0;
    double fi = 0.0;
    std::optional<double> qfi_closed;
    std::optional<double> fi_closed;
    std::size_t measurements = 1;
};

namespace detail {

inline void check_pair(const evolved_pair& p) {
    if (!p.psi.same_shape(p.dpsi))
        throw dimension_mismatch("psi and dpsi have different shapes");
}

} // namespace detail

/// 4 (<dpsi|dpsi> - |<dpsi|psi>|^2), clamped at zero.
inline double qfi_pure(const evolved_pair& p) {
    detail::check_pair(p);
    const double dd = inner_product(p.dpsi, p.dpsi).real();
    const double overlap = std::norm(inner_product(p.dpsi, p.psi));
    return std::max(0.0, 4.0 * (dd - overlap));
}

/// sum_x [2 Re <dpsi_x|psi_x>]^2 / p(x), with dp/dtheta taken from the coin
/// components at each site.
inline double position_fi(const evolved_pair& p) {
    detail::check_pair(p);
    const std::size_t dim = p.psi.coin_dim();
    const auto psi = p.psi.amplitudes();
    const auto dpsi = p.dpsi.amplitudes();
    double fi = 0.0;
    for (std::size_t x = 0; x < p.psi.n_positions(); ++x) {
        double prob = 0.0;
        double dprob = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const auto i = x * dim + j;
            prob += std::norm(psi[i]);
            dprob += 2.0 * (std::conj(dpsi[i]) * psi[i]).real();
        }
        if (prob >= fi_probability_floor) fi += dprob * dprob / prob;
    }
    return fi;
}

/// Re <dpsi|psi>; zero for any normalization-preserving family.
inline double overlap_real_part(const evolved_pair& p) {
    detail::check_pair(p);
    return inner_product(p.dpsi, p.psi).real();
}

inline Eigen::VectorXcd as_vector(const walker_state& s) {
    const auto a = s.amplitudes();
    return Eigen::Map<const Eigen::VectorXcd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

/// L = 2 (|psi><dpsi| + |dpsi><psi|).
inline Eigen::MatrixXcd sld_pure(const evolved_pair& p) {
    detail::check_pair(p);
    if (p.psi.size() > max_dense_dim)
        throw too_large_for_dense("N*D = " + std::to_string(p.psi.size()) + " exceeds " +
                                  std::to_string(max_dense_dim));
    const Eigen::VectorXcd psi = as_vector(p.psi);
    const Eigen::VectorXcd dpsi = as_vector(p.dpsi);
    return 2.0 * (psi * dpsi.adjoint() + dpsi * psi.adjoint());
}

/// 1 / (M F): variance bound after M repetitions.
inline double cramer_rao(double fisher, std::size_t measurements) {
    if (!(fisher > 0.0)) throw non_positive_fisher("Fisher information must be positive");
    if (measurements == 0) throw invalid_argument("measurement count must be positive");
    return 1.0 / (static_cast<double>(measurements) * fisher);
}

/// Per-site branch weights |alpha_x|^2 (coin -1) and |beta_x|^2 (coin +1).
struct branch_weight {
    double minus = 0.0;
    double plus = 0.0;
};

/// t^2 [1 - (sum_x |alpha_x|^2 - |beta_x|^2)^2] for the z-coin on the line.
inline double closed_form_line_z(std::span<const branch_weight> profile, std::size_t t) {
    double total = 0.0;
    double imbalance = 0.0;
    for (const auto& w : profile) {
        total += w.minus + w.plus;
        imbalance += w.minus - w.plus;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw unnormalized_profile("branch weights sum to " + std::to_string(total));
    const double tt = static_cast<double>(t);
    return tt * tt * (1.0 - imbalance * imbalance);
}

/// Enhanced D = 2 graph, probe alpha|-1> + e^{i gamma} sqrt(1-alpha^2)|+1>:
/// x: t^2 [1 - 4 a^2 (1-a^2) cos^2 gamma],  y: same with sin^2 gamma,
/// z: t^2 [1 - (2 a^2 - 1)^2].
inline double closed_form_enhanced(axis a, double alpha, double gamma, std::size_t t) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw invalid_argument("alpha must lie in [0, 1]");
    const double tt = static_cast<double>(t);
    const double a2 = alpha * alpha;
    switch (a) {
    case axis::x: {
        const double c = std::cos(gamma);
        return tt * tt * (1.0 - 4.0 * a2 * (1.0 - a2) * c * c);
    }
    case axis::y: {
        const double s = std::sin(gamma);
        return tt * tt * (1.0 - 4.0 * a2 * (1.0 - a2) * s * s);
    }
    case axis::z: {
        const double b = 2.0 * a2 - 1.0;
        return tt * tt * (1.0 - b * b);
    }
    }
    return 0.0;
}

/// Largest QFI reachable on the line with x/y coins from a localized probe,
/// attained at theta = pi.
inline double max_qfi_line_xy(std::size_t t) {
    const double tt = static_cast<double>(t);
    return tt * tt / 2.0 + static_cast<double>(t % 2) / 2.0;
}

/// (D-1)^2 t^2, the saturated QFI = FI of the enhanced topology.
inline double enhanced_max(std::size_t dim, std::size_t t) {
    detail::require_dim(dim);
    const double v = static_cast<double>((dim - 1) * t);
    return v * v;
}

/// QFI of the coin-only family C(theta)^t |phi>, with no position space.
inline double qudit_reference_qfi(axis a, double theta, std::size_t t, const coin_vector& coin,
                                  std::size_t dim) {
    detail::require_dim(dim);
    if (static_cast<std::size_t>(coin.size()) != dim)
        throw invalid_dimension("coin state has dimension " + std::to_string(coin.size()));
    if (std::abs(coin.squaredNorm() - 1.0) > 1e-10)
        throw not_normalized("coin state is not normalized");
    const auto c = make_coin(a, theta, dim);
    coin_vector v = coin;
    coin_vector dv = coin_vector::Zero(coin.size());
    for (std::size_t k = 0; k < t; ++k) {
        dv = (c.matrix * dv + c.derivative * v).eval();
        v = (c.matrix * v).eval();
    }
    const double dd = dv.squaredNorm();
    const double overlap = std::norm(dv.dot(v));
    return std::max(0.0, 4.0 * (dd - overlap));
}

} // namespace qwprobe
