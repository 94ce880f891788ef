#include "test_util.hpp"

#include <qwprobe/coinspace.hpp>
#include <qwprobe/evolution.hpp>
#include <qwprobe/probes.hpp>
#include <qwprobe/topology.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace qwprobe;

TEST(LocalizedProbe, Boundaries) {
    const auto s = localized_probe(2, 1.0, 0.7, 5);
    EXPECT_EQ(s(2, 0), amplitude(1.0));
    EXPECT_EQ(s(2, 1), amplitude(0.0));
    EXPECT_THROW(localized_probe(5, 1.0, 0.0, 5), index_out_of_range);
    EXPECT_THROW(localized_probe(0, 1.1, 0.0, 5), invalid_argument);
}

TEST(LocalizedProbe, AlphaGammaComponents) {
    const auto s = localized_probe(1, 0.6, std::numbers::pi / 3.0, 3);
    EXPECT_NEAR(std::abs(s(1, 0) - 0.6), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s(1, 1) - std::polar(0.8, std::numbers::pi / 3.0)), 0.0, 1e-15);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-14);
}

TEST(LocalizedProbe, BalancedZProbeEqualsOptimalCoin) {
    const auto s = localized_probe(0, std::numbers::sqrt2 / 2.0, 0.0, 3);
    const auto c = optimal_coin_state(axis::z, 2, 0.0);
    EXPECT_NEAR(std::abs(s(0, 0) - c(0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s(0, 1) - c(1)), 0.0, 1e-15);
}

TEST(LocalizedProbe, HigherDimensionUsesPlusMinusOneLabels) {
    const auto s = localized_probe(0, 0.6, 0.0, 2, 4);
    EXPECT_NEAR(std::abs(s(0, coin_index(-1, 4))), 0.6, 1e-15);
    EXPECT_NEAR(std::abs(s(0, coin_index(1, 4))), 0.8, 1e-15);
}

TEST(GaussianProbe, NarrowLimitIsLocalized) {
    const auto g = gaussian_probe(10, 1e-3, basis_coin(0, 2), 21);
    const auto l = localized_probe(10, basis_coin(0, 2), 21);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_NEAR(std::abs(g.amplitudes()[i] - l.amplitudes()[i]), 0.0, 1e-10);
}

TEST(GaussianProbe, LatticeSumNormalization) {
    const std::size_t n = 64, x0 = 32;
    const double sigma = 1.0;
    const auto s = gaussian_probe(x0, sigma, basis_coin(0, 2), n);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    // A from the direct sum: 1 / sum_x exp(-(x - x0)^2 / sigma^2).
    double sum = 0.0;
    for (int x = 0; x < 64; ++x) sum += std::exp(-(x - 32.0) * (x - 32.0) / (sigma * sigma));
    const double amp = std::sqrt(1.0 / sum);
    EXPECT_NEAR(s(x0, 0).real(), amp, 1e-14);
    EXPECT_NEAR(s(x0 + 2, 0).real(), amp * std::exp(-2.0), 1e-14);
}

TEST(GaussianProbe, WideLimitIsUniform) {
    const auto p = position_distribution(gaussian_probe(32, 1e6, basis_coin(0, 2), 64));
    for (double v : p) EXPECT_NEAR(v, 1.0 / 64.0, 1e-8);
}

TEST(GaussianProbe, ReflectionSymmetricOnRing) {
    for (std::size_t x0 : {0u, 5u, 17u}) {
        const std::size_t n = 23;
        const auto p = position_distribution(gaussian_probe(x0, 2.5, basis_coin(1, 2), n));
        for (std::size_t x = 0; x < n; ++x)
            EXPECT_NEAR(p[x], p[(2 * x0 + n - x) % n], 1e-15);
    }
}

TEST(GaussianProbe, Errors) {
    EXPECT_THROW(gaussian_probe(0, 0.0, basis_coin(0, 2), 4), invalid_sigma);
    EXPECT_THROW(gaussian_probe(0, -1.0, basis_coin(0, 2), 4), invalid_sigma);
    EXPECT_THROW(gaussian_probe(0, NAN, basis_coin(0, 2), 4), invalid_sigma);
}

TEST(GaussianProbe, PerSiteCoins) {
    std::mt19937 rng(4);
    std::vector<coin_vector> coins;
    for (int i = 0; i < 12; ++i) coins.push_back(testutil::random_coin(3, rng));
    const auto s = gaussian_probe(6, 2.0, coins);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    EXPECT_EQ(s.coin_dim(), 3u);
}

TEST(UniformProbe, SingleSiteAndFlat) {
    const auto one = uniform_probe(basis_coin(0, 2), 1);
    EXPECT_EQ(one(0, 0), amplitude(1.0));
    const auto s = uniform_probe(basis_coin(0, 2), 4);
    for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(std::norm(s(x, 0)), 0.25, 1e-15);
}

TEST(UniformProbe, StaysUniformUnderXCoin) {
    std::mt19937 rng(8);
    const std::size_t n = 9;
    const auto probe = uniform_probe(testutil::random_coin(2, rng), n);
    walk_config cfg(shift_from_graph(line_graph(n)), make_coin(axis::x, 0.9, 2), 1);
    for (double p : position_distribution(step(cfg, probe))) EXPECT_NEAR(p, 1.0 / n, 1e-14);
}

TEST(CustomProbe, Normalizes) {
    const auto s = custom_probe(4, 2, {{0, Eigen::Vector2cd(1, 0)}, {3, Eigen::Vector2cd(0, 1)}});
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
    EXPECT_NEAR(std::norm(s(3, 1)), 0.5, 1e-15);
    EXPECT_THROW(custom_probe(4, 2, {{4, Eigen::Vector2cd(1, 0)}}), index_out_of_range);
    EXPECT_THROW(custom_probe(4, 2, {}), not_normalized);
}

TEST(OptimalCoinState, ZQubit) {
    const auto c = optimal_coin_state(axis::z, 2, 0.0);
    const double r = std::numbers::sqrt2 / 2.0;
    EXPECT_LT((c - Eigen::Vector2cd(r, r)).norm(), 1e-15);
}

TEST(OptimalCoinState, XQubitMatchesBasisChangeUpToPhase) {
    const auto bc = make_basis_change(2);
    for (double gamma : {0.0, std::numbers::pi}) {
        const coin_vector c = optimal_coin_state(axis::x, 2, gamma);
        const coin_vector ref = bc.v * two_level_coin(std::numbers::sqrt2 / 2.0, gamma);
        EXPECT_NEAR(std::abs(ref.dot(c)), 1.0, 1e-12) << gamma;
    }
    // The relative phase sits on e_max, so for general gamma the match is V (|+1> + e^{i gamma}|-1>).
    for (double gamma : {0.4, 2.0}) {
        const coin_vector c = optimal_coin_state(axis::x, 2, gamma);
        const coin_vector ref = bc.v * optimal_coin_state(axis::z, 2, gamma);
        EXPECT_NEAR(std::abs(ref.dot(c)), 1.0, 1e-12) << gamma;
    }
}

TEST(OptimalCoinState, YQuquart) {
    const double gamma = std::numbers::pi / 4.0;
    const auto c = optimal_coin_state(axis::y, 4, gamma);
    EXPECT_NEAR(c.norm(), 1.0, 1e-12);
    const auto g = make_spin_generators(4);
    const auto e = extremal_eigenstates(axis::y, 4);
    EXPECT_LT((g.t_y * e.e_min + 1.5 * e.e_min).norm(), 1e-10);
    EXPECT_LT((g.t_y * e.e_max - 1.5 * e.e_max).norm(), 1e-10);
    EXPECT_LT((c - (e.e_min + std::polar(1.0, gamma) * e.e_max) / std::numbers::sqrt2).norm(), 1e-15);
}
