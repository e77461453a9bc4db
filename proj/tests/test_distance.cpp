#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "depthmon/distance.hpp"
#include "depthmon/error.hpp"
#include "oracles.hpp"

namespace depthmon::monitor {
namespace {

std::vector<double> random_density(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution hole(0.2);
    std::vector<double> f(n);
    for (auto& v : f) {
        v = hole(rng) ? 0.0 : e(rng);
    }
    f[0] += 1e-3;
    return f;
}

TEST(Hellinger, HandValues) {
    const double step = 0.5;
    const std::vector<double> f{1.0, 1.0};  // (0.5, 0.5) / step
    const std::vector<double> g{2.0, 0.0};  // (1, 0) / step
    EXPECT_NEAR(hellinger(f, g, step), std::sqrt(1.0 - std::sqrt(0.5)), 1e-12);
    EXPECT_NEAR(hellinger(f, g, step), 0.5412, 1e-4);
    EXPECT_EQ(hellinger(f, f, step), 0.0);
    EXPECT_EQ(hellinger(std::vector<double>{1, 0}, std::vector<double>{0, 1}, 1.0), 1.0);
}

TEST(Kolmogorov, HandValues) {
    const std::vector<double> f{0.5, 0.5};
    const std::vector<double> g{0.2, 0.8};
    EXPECT_NEAR(kolmogorov(f, g, 1.0), 0.3, 1e-12);
    EXPECT_EQ(kolmogorov(f, f, 1.0), 0.0);
    EXPECT_NEAR(kolmogorov(std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 1}, 1.0), 1.0, 1e-15);
}

TEST(AbsDev, HandValues) {
    EXPECT_EQ(abs_dev(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 2.0);
    EXPECT_EQ(abs_dev(std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}), 0.0);
}

TEST(Distances, MatchLoopOracles) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_density(rng, 40);
        const auto g = random_density(rng, 40);
        EXPECT_NEAR(hellinger(f, g, 0.25), oracle::hellinger(f, g), 1e-12);
        EXPECT_NEAR(kolmogorov(f, g, 0.25), oracle::kolmogorov(f, g), 1e-12);
        double sum = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            sum += std::abs(f[i] - g[i]);
        }
        EXPECT_NEAR(abs_dev(f, g), sum, 1e-12);
    }
}

TEST(Distances, SymmetricAndBounded) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_density(rng, 25);
        const auto g = random_density(rng, 25);
        for (auto kind : {DistanceKind::hellinger, DistanceKind::kolmogorov}) {
            const double d = distance(kind, f, g, 0.1);
            EXPECT_EQ(d, distance(kind, g, f, 0.1));
            EXPECT_GE(d, 0.0);
            EXPECT_LE(d, 1.0);
        }
    }
}

TEST(Distances, RejectMalformedRows) {
    const std::vector<double> f{1, 2};
    EXPECT_THROW(static_cast<void>(hellinger(f, std::vector<double>{1, 2, 3}, 1.0)), std::invalid_argument);
    EXPECT_THROW(static_cast<void>(hellinger(f, std::vector<double>{-1, 2}, 1.0)), std::invalid_argument);
    EXPECT_THROW(static_cast<void>(hellinger(f, std::vector<double>{0, 0}, 1.0)), NumericalError);
    EXPECT_THROW(static_cast<void>(distance_kind_from_string("l2")), std::invalid_argument);
}

TEST(Distances, EstimateLevelRequiresAlignedGrids) {
    cde::DensityEstimate a;
    a.condition_points = {0.0, 1.0};
    a.y_grid = {0.0, 1.0, 2.0};
    a.values = {1, 2, 1, 1, 1, 1};
    auto b = a;
    b.values = {1, 2, 1, 2, 1, 2};
    const double step = 1.0;
    const double expected = 0.5 * (hellinger(a.row(0), b.row(0), step) + hellinger(a.row(1), b.row(1), step));
    EXPECT_NEAR(distance(DistanceKind::hellinger, a, b), expected, 1e-15);
    b.y_grid = {0.0, 1.0, 2.5};
    EXPECT_THROW(static_cast<void>(distance(DistanceKind::hellinger, a, b)), std::invalid_argument);
}

}  // namespace
}  // namespace depthmon::monitor
