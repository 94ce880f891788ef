// coinspace.hpp
// Spin-s rotation generators and the rotation coins C_n(theta) = exp(-i theta T_n)
// acting on a D-dimensional coin.
//
// Basis convention: coin index j = 0 carries the largest T_z eigenvalue
// (D-1)/2, so the D = 2 z-coin is diag(e^{-i theta/2}, e^{i theta/2}) with
// the first entry on the coin label -1.
//
// Coin labels. For odd D the labels are the integers -s..s with s = (D-1)/2.
// For even D they skip zero: -D/2..-1, 1..D/2. Label order follows coin index
// order (index 0 is the most negative label).

#pragma once

#include "errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

namespace qwprobe {

using coin_matrix_t = Eigen::MatrixXcd;
using coin_vector = Eigen::VectorXcd;

enum class axis { x, y, z };

inline std::string_view to_string(axis a) {
    switch (a) {
    case axis::x: return "x";
    case axis::y: return "y";
    case axis::z: return "z";
    }
    return "?";
}

inline axis parse_axis(std::string_view s) {
    if (s == "x") return axis::x;
    if (s == "y") return axis::y;
    if (s == "z") return axis::z;
    throw invalid_argument("unknown axis '" + std::string(s) + "' (expected x, y or z)");
}

struct spin_generators {
    std::size_t dim = 0;
    coin_matrix_t t_x;
    coin_matrix_t t_y;
    coin_matrix_t t_z;

    const coin_matrix_t& operator[](axis a) const {
        switch (a) {
        case axis::x: return t_x;
        case axis::y: return t_y;
        default: return t_z;
        }
    }
};

namespace detail {

inline void require_dim(std::size_t dim) {
    if (dim < 2) throw invalid_dimension("coin dimension must be >= 2, got " + std::to_string(dim));
}

/// Rotate each column so its first component above `tol` is real positive.
inline void fix_column_phases(coin_matrix_t& m, double tol = 1e-10) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const auto v = m(r, c);
            if (std::abs(v) > tol) {
                m.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
}

/// Eigenvectors of a Hermitian matrix, columns ordered by descending
/// eigenvalue, phase-fixed.
inline std::pair<Eigen::VectorXd, coin_matrix_t> descending_eigensystem(const coin_matrix_t& h) {
    Eigen::SelfAdjointEigenSolver<coin_matrix_t> solver(h);
    const Eigen::Index n = h.rows();
    Eigen::VectorXd values(n);
    coin_matrix_t vectors(n, n);
    // Eigen sorts ascending.
    for (Eigen::Index k = 0; k < n; ++k) {
        values(k) = solver.eigenvalues()(n - 1 - k);
        vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    fix_column_phases(vectors);
    return {values, vectors};
}

} // namespace detail

/// Spin-s matrices for s = (D-1)/2 in the descending-m basis.
inline spin_generators make_spin_generators(std::size_t dim) {
    detail::require_dim(dim);
    const auto n = static_cast<Eigen::Index>(dim);
    const double s = (static_cast<double>(dim) - 1.0) / 2.0;

    coin_matrix_t raise = coin_matrix_t::Zero(n, n);
    spin_generators g;
    g.dim = dim;
    g.t_z = coin_matrix_t::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double m = s - static_cast<double>(k);
        g.t_z(k, k) = m;
        // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
        if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    const coin_matrix_t lower = raise.adjoint();
    g.t_x = (raise + lower) / 2.0;
    g.t_y = (raise - lower) / std::complex<double>(0.0, 2.0);
    return g;
}

/// A one-parameter coin family evaluated at theta: matrix = C(theta),
/// derivative = dC/dtheta.
struct coin_operator {
    std::size_t dim = 0;
    axis rotation_axis = axis::z;
    double theta = 0.0;
    coin_matrix_t matrix;
    coin_matrix_t derivative;
};

/// exp(-i theta T_axis) through the Hermitian eigendecomposition of T_axis.
inline coin_operator make_coin(axis a, double theta, std::size_t dim) {
    detail::require_dim(dim);
    if (!std::isfinite(theta)) throw non_finite_parameter("coin angle must be finite");

    const auto gens = make_spin_generators(dim);
    const auto& gen = gens[a];
    const auto n = static_cast<Eigen::Index>(dim);
    const std::complex<double> minus_i{0.0, -1.0};

    coin_operator c;
    c.dim = dim;
    c.rotation_axis = a;
    c.theta = theta;
    if (a == axis::z) {
        c.matrix = coin_matrix_t::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            c.matrix(k, k) = std::exp(minus_i * theta * gen(k, k).real());
    } else {
        Eigen::SelfAdjointEigenSolver<coin_matrix_t> solver(gen);
        const auto& q = solver.eigenvectors();
        Eigen::VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k)
            phases(k) = std::exp(minus_i * theta * solver.eigenvalues()(k));
        c.matrix = q * phases.asDiagonal() * q.adjoint();
    }
    c.derivative = minus_i * gen * c.matrix;
    return c;
}

/// Left-multiplies a fixed unitary onto a coin family. The result is still a
/// valid theta-family (derivative = fixed * dC) but no longer a pure rotation.
inline coin_operator with_fixed_rotation(coin_operator c, const coin_matrix_t& fixed) {
    if (fixed.rows() != static_cast<Eigen::Index>(c.dim) || fixed.cols() != fixed.rows())
        throw dimension_mismatch("fixed rotation has wrong size");
    c.matrix = fixed * c.matrix;
    c.derivative = fixed * c.derivative;
    return c;
}

/// V diagonalizes T_x and W diagonalizes T_y: V T_z V^dag = T_x, W T_z W^dag = T_y.
struct basis_change {
    std::size_t dim = 0;
    coin_matrix_t v;
    coin_matrix_t w;
};

inline basis_change make_basis_change(std::size_t dim) {
    detail::require_dim(dim);
    const auto gens = make_spin_generators(dim);
    return basis_change{dim, detail::descending_eigensystem(gens.t_x).second,
                        detail::descending_eigensystem(gens.t_y).second};
}

struct extremal_pair {
    coin_vector e_min;
    coin_vector e_max;
};

/// Eigenvectors of T_axis for the eigenvalues -(D-1)/2 and +(D-1)/2.
inline extremal_pair extremal_eigenstates(axis a, std::size_t dim) {
    detail::require_dim(dim);
    const auto gens = make_spin_generators(dim);
    const auto vectors = detail::descending_eigensystem(gens[a]).second;
    return extremal_pair{vectors.col(vectors.cols() - 1), vectors.col(0)};
}

/// Coin label of index j (see the header comment for the label sets).
inline int coin_label(std::size_t j, std::size_t dim) {
    detail::require_dim(dim);
    if (j >= dim) throw label_out_of_range("coin index " + std::to_string(j) + " >= D");
    const auto d = static_cast<int>(dim);
    const auto k = static_cast<int>(j);
    if (d % 2 == 1) return k - (d - 1) / 2;
    const int half = d / 2;
    return k < half ? k - half : k - half + 1;
}

inline std::size_t coin_index(int label, std::size_t dim) {
    detail::require_dim(dim);
    const auto d = static_cast<int>(dim);
    int k = 0;
    if (d % 2 == 1) {
        k = label + (d - 1) / 2;
    } else {
        const int half = d / 2;
        if (label == 0)
            throw label_out_of_range("coin label 0 does not exist for even D");
        k = label < 0 ? label + half : label + half - 1;
    }
    if (k < 0 || k >= d)
        throw label_out_of_range("coin label " + std::to_string(label) +
                                 " out of range for D=" + std::to_string(dim));
    return static_cast<std::size_t>(k);
}

} // namespace qwprobe
