#include <random>

#include <gtest/gtest.h>

#include "depthmon/binning.hpp"
#include "depthmon/error.hpp"

namespace depthmon::binning {
namespace {

core::LaggedPairs pairs_of(std::vector<std::array<double, 2>> p) {
    core::LaggedPairs lp;
    lp.pairs = std::move(p);
    return lp;
}

core::LaggedPairs normal_pairs(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z;
    core::LaggedPairs lp;
    for (std::size_t i = 0; i < n; ++i) {
        lp.pairs.push_back({z(rng), z(rng)});
    }
    return lp;
}

TEST(Grid, EqualSpacing) {
    const auto g = make_grid(0.0, 8.0, 5);
    EXPECT_EQ(g.edges, (std::vector<double>{0, 2, 4, 6, 8}));
    EXPECT_DOUBLE_EQ(g.spacing(), 2.0);
}

TEST(Grid, LeftClosedClasses) {
    const auto g = make_grid(0.0, 8.0, 5);
    EXPECT_EQ(g.axis_class(-0.1), 0u);
    EXPECT_EQ(g.axis_class(0.0), 1u);
    EXPECT_EQ(g.axis_class(2.0), 2u);
    EXPECT_EQ(g.axis_class(7.999), 4u);
    EXPECT_EQ(g.axis_class(8.0), 5u);
}

TEST(Grid, RejectsDegenerateInput) {
    EXPECT_THROW(static_cast<void>(make_grid(1.0, 1.0, 5)), NumericalError);
    EXPECT_THROW(static_cast<void>(make_grid(0.0, 1.0, 2)), std::invalid_argument);
}

TEST(Bin2d, AllPointsInOneCell) {
    const auto g = make_grid(0.0, 3.0, 4);
    const auto b = bin2d(pairs_of({{1.2, 1.5}, {1.9, 1.1}, {1.0, 1.0}}), g);
    EXPECT_EQ(b.count(1, 1), 3u);
    EXPECT_EQ(b.total_interior, 3u);
    std::size_t total = 0;
    for (auto c : b.joint_counts) {
        total += c;
    }
    EXPECT_EQ(total, 3u);
}

TEST(Bin2d, HandPlacedPointsWithOneTrimmed) {
    const auto g = make_grid(0.0, 2.0, 3);
    const auto b = bin2d(pairs_of({{0.5, 0.5}, {0.5, 0.7}, {1.5, 0.5}, {2.5, 0.5}}), g);
    EXPECT_EQ(b.count(0, 0), 2u);
    EXPECT_EQ(b.count(1, 0), 1u);
    EXPECT_EQ(b.trimmed_count, 1u);
    EXPECT_EQ(b.marginal_x, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(b.marginal_y, (std::vector<std::size_t>{3, 0}));
    EXPECT_EQ(b.midpoints_x, (std::vector<double>{0.5, 1.5}));
}

TEST(Bin2d, CountsPlusTrimmedEqualPairs) {
    std::mt19937_64 rng(1);
    const auto p = normal_pairs(rng, 500);
    const auto b = bin2d(p, make_grid(-1.5, 1.5, 20));
    EXPECT_EQ(b.total_interior + b.trimmed_count, 500u);
}

TEST(DepthGrid, FullMassCoversEverything) {
    core::LaggedPairs p;
    for (int i = 0; i <= 10; ++i) {
        p.pairs.push_back({static_cast<double>(i), static_cast<double>(10 - i)});
    }
    const auto g = depth_grid(p, depth::DepthParams{}, 0.999, 11, BetaMode::central_mass);
    EXPECT_LE(g.edges.front(), 0.0);
    EXPECT_GE(g.edges.back(), 10.0);
}

TEST(DepthGrid, OutliersLeftOutOfTheSupport) {
    std::mt19937_64 rng(2);
    auto p = normal_pairs(rng, 1000);
    for (int i = 0; i < 5; ++i) {
        p.pairs.push_back({100.0, 100.0});
    }
    EXPECT_LT(depth_grid(p, depth::DepthParams{}, 0.95, 50, BetaMode::central_mass).edges.back(), 100.0);
    EXPECT_LT(depth_grid(p, depth::DepthParams{}, 0.05, 50, BetaMode::trim_mass).edges.back(), 100.0);
}

TEST(DepthGrid, ZeroWidthRegion) {
    const auto p = pairs_of(std::vector<std::array<double, 2>>(10, {1.0, 1.0}));
    try {
        static_cast<void>(depth_grid(p, depth::DepthParams{}, 0.05, 5));
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_STREQ(e.what(), "zero-width grid");
    }
}

TEST(RobustBin, CleanSampleKeepsAlmostEverything) {
    std::mt19937_64 rng(3);
    const auto p = normal_pairs(rng, 2000);
    const auto b = robust_bin(p, depth::DepthParams{}, 0.01, 100);
    EXPECT_GT(b.total_interior, 1900u);
}

TEST(RobustBin, FarOutliersAreTrimmed) {
    std::mt19937_64 rng(4);
    auto p = normal_pairs(rng, 900);
    std::uniform_real_distribution<double> far(50.0, 60.0);
    for (int i = 0; i < 100; ++i) {
        p.pairs.push_back({far(rng), far(rng)});
    }
    const auto b = robust_bin(p, depth::DepthParams{}, 0.15, 200);  // trims more than the outlier share
    EXPECT_GE(b.trimmed_count, 100u);
}

TEST(RobustBin, BetaModesAreComplementary) {
    EXPECT_DOUBLE_EQ(covered_mass(0.05, BetaMode::trim_mass), 0.95);
    EXPECT_DOUBLE_EQ(covered_mass(0.95, BetaMode::central_mass), 0.95);
    EXPECT_EQ(beta_mode_from_string("trim_mass"), BetaMode::trim_mass);
    EXPECT_THROW(static_cast<void>(beta_mode_from_string("bogus")), std::invalid_argument);
}

}  // namespace
}  // namespace depthmon::binning
