// state.hpp
// Dense walker states on the position (x) coin Hilbert space.

#pragma once

#include "errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qwprobe {

using amplitude = std::complex<double>;

/// Amplitudes are stored position-major: index x * coin_dim + j.
/// Coin index j = 0 is the first basis column (label -1 for D = 2).
class walker_state {
public:
    walker_state() = default;

    walker_state(std::size_t n_positions, std::size_t coin_dim, bool normalized = false)
        : n_positions_(n_positions), coin_dim_(coin_dim),
          amplitudes_(n_positions * coin_dim), normalized_(normalized) {
        if (n_positions == 0 || coin_dim == 0)
            throw invalid_size("walker_state needs positive N and D");
    }

    walker_state(std::size_t n_positions, std::size_t coin_dim,
                 std::vector<amplitude> amplitudes, bool normalized)
        : n_positions_(n_positions), coin_dim_(coin_dim),
          amplitudes_(std::move(amplitudes)), normalized_(normalized) {
        if (n_positions == 0 || coin_dim == 0)
            throw invalid_size("walker_state needs positive N and D");
        if (amplitudes_.size() != n_positions * coin_dim)
            throw dimension_mismatch("amplitude count does not equal N * D");
        if (normalized_ && std::abs(norm_squared() - 1.0) > 1e-12)
            throw not_normalized("state flagged normalized has norm^2 " +
                                 std::to_string(norm_squared()));
    }

    std::size_t n_positions() const noexcept { return n_positions_; }
    std::size_t coin_dim() const noexcept { return coin_dim_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }
    bool normalized() const noexcept { return normalized_; }
    void set_normalized(bool flag) noexcept { normalized_ = flag; }

    amplitude& operator()(std::size_t x, std::size_t j) { return amplitudes_[x * coin_dim_ + j]; }
    const amplitude& operator()(std::size_t x, std::size_t j) const {
        return amplitudes_[x * coin_dim_ + j];
    }

    std::span<amplitude> amplitudes() noexcept { return amplitudes_; }
    std::span<const amplitude> amplitudes() const noexcept { return amplitudes_; }

    /// Coin amplitudes at one site.
    std::span<const amplitude> site(std::size_t x) const {
        return std::span<const amplitude>(amplitudes_).subspan(x * coin_dim_, coin_dim_);
    }

    double norm_squared() const noexcept {
        double acc = 0.0;
        for (const auto& a : amplitudes_) acc += std::norm(a);
        return acc;
    }

    bool same_shape(const walker_state& other) const noexcept {
        return n_positions_ == other.n_positions_ && coin_dim_ == other.coin_dim_;
    }

    bool is_finite() const noexcept {
        for (const auto& a : amplitudes_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        return true;
    }

private:
    std::size_t n_positions_ = 0;
    std::size_t coin_dim_ = 0;
    std::vector<amplitude> amplitudes_;
    bool normalized_ = false;
};

/// <a|b>, antilinear in the first argument.
inline amplitude inner_product(const walker_state& a, const walker_state& b) {
    if (!a.same_shape(b)) throw dimension_mismatch("inner_product: state shapes differ");
    auto lhs = a.amplitudes();
    auto rhs = b.amplitudes();
    amplitude acc{0.0, 0.0};
    for (std::size_t i = 0; i < lhs.size(); ++i) acc += std::conj(lhs[i]) * rhs[i];
    return acc;
}

/// p(x) = sum_j |a_{x,j}|^2. Round-off negatives cannot occur here since
/// each term is a squared modulus, so only the sum invariant is checked.
inline std::vector<double> position_distribution(const walker_state& s) {
    if (!s.normalized())
        throw not_normalized("position_distribution requires a normalized state");
    std::vector<double> probs(s.n_positions(), 0.0);
    for (std::size_t x = 0; x < s.n_positions(); ++x)
        for (const auto& a : s.site(x)) probs[x] += std::norm(a);
    return probs;
}

} // namespace qwprobe
