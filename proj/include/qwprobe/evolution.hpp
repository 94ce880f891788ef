// evolution.hpp
// Walk evolution U = S (1 (x) C) and exact propagation of d(psi)/d(theta):
//   psi  <- S (1 (x) C) psi
//   dpsi <- S (1 (x) C) dpsi + S (1 (x) dC) psi_prev,   dpsi(0) = 0.

#pragma once

#include "coinspace.hpp"
#include "errors.hpp"
#include "state.hpp"
#include "topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qwprobe {

struct walk_config {
    shift_operator shift;
    coin_operator coin;
    std::size_t steps = 0;

    walk_config(shift_operator s, coin_operator c, std::size_t t)
        : shift(std::move(s)), coin(std::move(c)), steps(t) {
        if (shift.coin_dim != coin.dim)
            throw dimension_mismatch("shift has D=" + std::to_string(shift.coin_dim) +
                                     " but coin has D=" + std::to_string(coin.dim));
    }
};

struct evolved_pair {
    walker_state psi;
    walker_state dpsi;
    std::size_t t = 0;
    double theta = 0.0;
};

/// Sites needed so a wavefront started mid-ring does not wrap within t steps.
/// Capped at `max_auto_ring`: past that the Gaussian envelope is flat to
/// better than 1e-3 across the ring and wraparound is harmless.
inline constexpr std::size_t max_auto_ring = std::size_t{1} << 16;

inline std::size_t auto_ring_size(std::size_t steps, double sigma = 0.0) {
    const double spread = 6.0 * std::ceil(std::max(0.0, sigma));
    if (spread >= static_cast<double>(max_auto_ring)) return max_auto_ring;
    const std::size_t n = 2 * steps + static_cast<std::size_t>(spread) + 16;
    return std::min(n, max_auto_ring);
}

namespace detail {

inline void check_shape(const shift_operator& shift, const walker_state& s) {
    if (s.n_positions() != shift.n_positions || s.coin_dim() != shift.coin_dim)
        throw dimension_mismatch("state is " + std::to_string(s.n_positions()) + "x" +
                                 std::to_string(s.coin_dim()) + ", walk expects " +
                                 std::to_string(shift.n_positions) + "x" +
                                 std::to_string(shift.coin_dim));
}

/// Every occupied vertex must be active; for enhanced graphs the state must
/// also lie in the subspace reachable from the root.
inline void check_support(const shift_operator& shift, const walker_state& s) {
    const std::size_t dim = shift.coin_dim;
    for (std::size_t x = 0; x < shift.n_positions; ++x) {
        const auto site = s.site(x);
        bool occupied = false;
        for (const auto& a : site) occupied = occupied || a != amplitude{};
        if (!occupied) continue;
        if (!shift.active[x]) {
            if (shift.kind == graph_kind::enhanced)
                throw horizon_exceeded("amplitude on final layer " +
                                       std::to_string(shift.horizon) +
                                       " of the enhanced graph; build it with a larger t_max");
            throw horizon_exceeded("amplitude on vertex " + std::to_string(x + 1) +
                                   " which lacks an edge for some coin label");
        }
        if (shift.kind == graph_kind::enhanced && x != 0) {
            const std::size_t k = (x - 1) % dim;
            for (std::size_t j = 0; j < dim; ++j)
                if (j != k && site[j] != amplitude{})
                    throw outside_reachable_subspace(
                        "vertex " + std::to_string(x + 1) +
                        " carries a coin component other than its own label");
        }
    }
}

/// out = S (1 (x) a) in_a + S (1 (x) b) in_b  (the b term is optional).
inline void apply_walk(const shift_operator& shift, const coin_matrix_t& a,
                       std::span<const amplitude> in_a, const coin_matrix_t* b,
                       std::span<const amplitude> in_b, std::span<amplitude> out) {
    const std::size_t dim = shift.coin_dim;
    std::fill(out.begin(), out.end(), amplitude{});
    std::vector<amplitude> local(dim);
    for (std::size_t x = 0; x < shift.n_positions; ++x) {
        if (!shift.active[x]) continue;
        const auto* pa = in_a.data() + x * dim;
        const auto* pb = b ? in_b.data() + x * dim : nullptr;
        for (std::size_t j = 0; j < dim; ++j) {
            amplitude acc{};
            for (std::size_t k = 0; k < dim; ++k) {
                acc += a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * pa[k];
                if (pb) acc += (*b)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * pb[k];
            }
            local[j] = acc;
        }
        for (std::size_t j = 0; j < dim; ++j) out[shift.perms[j][x] * dim + j] += local[j];
    }
}

} // namespace detail

/// One application of U = S (1 (x) C).
inline walker_state step(const walk_config& cfg, const walker_state& s) {
    detail::check_shape(cfg.shift, s);
    detail::check_support(cfg.shift, s);
    walker_state out(s.n_positions(), s.coin_dim(), s.normalized());
    detail::apply_walk(cfg.shift, cfg.coin.matrix, s.amplitudes(), nullptr, {}, out.amplitudes());
    return out;
}

/// U^steps applied to `s`.
inline walker_state evolve(const walk_config& cfg, walker_state s) {
    for (std::size_t t = 0; t < cfg.steps; ++t) s = step(cfg, s);
    return s;
}

/// Runs psi and dpsi forward, invoking `visit(pair)` after every step
/// (t = 1..steps) and once for t = 0 when `include_start` is set.
template <class Visitor>
void evolve_trajectory(const walk_config& cfg, const walker_state& probe, Visitor&& visit,
                       bool include_start = false) {
    detail::check_shape(cfg.shift, probe);
    if (!probe.normalized())
        throw not_normalized("evolution requires a normalized probe");

    evolved_pair pair{probe, walker_state(probe.n_positions(), probe.coin_dim(), false), 0,
                      cfg.coin.theta};
    if (include_start) visit(std::as_const(pair));
    walker_state next_psi(probe.n_positions(), probe.coin_dim(), true);
    walker_state next_dpsi(probe.n_positions(), probe.coin_dim(), false);
    for (std::size_t t = 1; t <= cfg.steps; ++t) {
        detail::check_support(cfg.shift, pair.psi);
        detail::check_support(cfg.shift, pair.dpsi);
        detail::apply_walk(cfg.shift, cfg.coin.matrix, pair.psi.amplitudes(), nullptr, {},
                           next_psi.amplitudes());
        detail::apply_walk(cfg.shift, cfg.coin.matrix, pair.dpsi.amplitudes(),
                           &cfg.coin.derivative, pair.psi.amplitudes(), next_dpsi.amplitudes());
        std::swap(pair.psi, next_psi);
        std::swap(pair.dpsi, next_dpsi);
        pair.t = t;
        visit(std::as_const(pair));
    }
}

inline evolved_pair evolve_with_derivative(const walk_config& cfg, const walker_state& probe) {
    evolved_pair result;
    bool seen = false;
    evolve_trajectory(
        cfg, probe,
        [&](const evolved_pair& p) {
            if (p.t == cfg.steps) {
                result = p;
                seen = true;
            }
        },
        cfg.steps == 0);
    if (!seen) throw invalid_argument("evolution produced no final state");
    return result;
}

} // namespace qwprobe
