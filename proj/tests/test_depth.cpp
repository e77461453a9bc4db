#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "depthmon/depth.hpp"
#include "oracles.hpp"

namespace depthmon::depth {
namespace {

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> z;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows) {
        for (auto& v : r) {
            v = z(rng);
        }
    }
    return rows;
}

TEST(Depth, SinglePointSampleHasMaximalDepth) {
    const auto s = Sample::from_values(std::vector<double>{3.0});
    const double z[1] = {3.0};
    EXPECT_DOUBLE_EQ(weighted_lp_depth(z, s), 0.5);
    EXPECT_EQ(depth_all(s), std::vector<double>{0.5});
}

TEST(Depth, HandValuesInOneDimension) {
    const auto s = Sample::from_values(std::vector<double>{0.0, 2.0});
    const double one[1] = {1.0};
    const double five[1] = {5.0};
    EXPECT_NEAR(weighted_lp_depth(one, s), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(weighted_lp_depth(five, s), 1.0 / 6.0, 1e-15);
    const auto all = depth_all(s);
    EXPECT_NEAR(all[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(all[1], 1.0 / 3.0, 1e-15);
}

TEST(Depth, MatchesBruteForceLoop) {
    std::mt19937_64 rng(7);
    for (std::size_t d : {1u, 2u, 5u}) {
        for (double p : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()}) {
            const auto rows = random_rows(rng, 120, d);
            const DepthParams params{p, 0.7, 1.3};
            const auto fast = depth_all(Sample::from_rows(rows), params);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                EXPECT_NEAR(fast[i], oracle::depth(rows[i], rows, p, 0.7, 1.3), 1e-12);
            }
        }
    }
}

TEST(Depth, DepthAgainstMatchesBruteForce) {
    std::mt19937_64 rng(8);
    const auto pts = random_rows(rng, 30, 3);
    const auto ref = random_rows(rng, 50, 3);
    const auto d = depth_against(Sample::from_rows(pts), Sample::from_rows(ref));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_NEAR(d[i], oracle::depth(pts[i], ref, 2.0, 1.0, 1.0), 1e-12);
    }
}

TEST(Depth, BoundedByOneOverOnePlusA) {
    std::mt19937_64 rng(9);
    const DepthParams params{2.0, 0.25, 2.0};
    for (double v : depth_all(Sample::from_rows(random_rows(rng, 200, 2)), params)) {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, params.max_depth());
    }
}

TEST(Depth, RejectsInvalidParameters) {
    EXPECT_THROW((DepthParams{0.5, 1.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((DepthParams{2.0, 0.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((DepthParams{2.0, 1.0, -1.0}.validate()), std::invalid_argument);
}

TEST(LpMedian, HandExample) {
    const auto s = Sample::from_values(std::vector<double>{0.0, 1.0, 10.0});
    EXPECT_EQ(lp_median(s)[0], 1.0);
    const auto d = depth_all(s);
    EXPECT_NEAR(d[0], 3.0 / 17.0, 1e-15);
    EXPECT_NEAR(d[1], 3.0 / 16.0, 1e-15);
    EXPECT_NEAR(d[2], 3.0 / 25.0, 1e-15);
}

TEST(LpMedian, SingletonAndTranslation) {
    EXPECT_EQ(lp_median(Sample::from_values(std::vector<double>{4.0}))[0], 4.0);
    std::mt19937_64 rng(10);
    const auto s = Sample::from_rows(random_rows(rng, 60, 2));
    const std::vector<double> c{3.0, -1.5};
    const auto m = lp_median(s);
    const auto mt = lp_median(s.translated(c));
    EXPECT_NEAR(mt[0], m[0] + c[0], 1e-12);
    EXPECT_NEAR(mt[1], m[1] + c[1], 1e-12);
}

TEST(CentralRegion, ThresholdSelection) {
    const auto s = Sample::from_values(std::vector<double>{0.0, 1.0, 10.0});
    const DepthParams params;
    EXPECT_EQ(central_region(s, params, 0.0).members.size(), 3u);
    EXPECT_TRUE(central_region(s, params, 0.6).members.empty());
    EXPECT_EQ(central_region(s, params, 0.18).members, std::vector<std::size_t>{1});
    EXPECT_EQ(central_region(s, params, 0.17).members, (std::vector<std::size_t>{0, 1}));
    EXPECT_TRUE(central_region(s, params, 0.23).members.empty());
}

TEST(CentralRegion, RegionsAreNested) {
    std::mt19937_64 rng(11);
    const auto d = depth_all(Sample::from_rows(random_rows(rng, 100, 2)));
    std::vector<std::size_t> previous;
    bool first = true;
    for (double alpha = 0.0; alpha <= 0.5; alpha += 0.01) {
        const auto r = central_region(d, alpha).members;
        if (!first) {
            EXPECT_TRUE(std::includes(previous.begin(), previous.end(), r.begin(), r.end()));
        }
        previous = r;
        first = false;
    }
}

TEST(SmallestRegion, BetaLimits) {
    std::mt19937_64 rng(12);
    const auto s = Sample::from_rows(random_rows(rng, 100, 2));
    const auto d = depth_all(s);
    EXPECT_EQ(smallest_region_beta(d, 1.0).members.size(), 100u);
    const auto one = smallest_region_beta(d, 0.01).members;
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], deepest_index(d));
}

TEST(SmallestRegion, HalfMassHoldsTheDeepestPoints) {
    std::mt19937_64 rng(13);
    const auto d = depth_all(Sample::from_rows(random_rows(rng, 100, 2)));
    const auto region = smallest_region_beta(d, 0.5).members;
    ASSERT_EQ(region.size(), 50u);
    double inside_min = 1.0;
    for (auto i : region) {
        inside_min = std::min(inside_min, d[i]);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::binary_search(region.begin(), region.end(), i)) {
            EXPECT_LE(d[i], inside_min);
        }
    }
}

}  // namespace
}  // namespace depthmon::depth
