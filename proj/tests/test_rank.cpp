#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "depthmon/rank.hpp"
#include "oracles.hpp"

namespace depthmon::rank {
namespace {

Sample normal_sample(std::mt19937_64& rng, std::size_t n, std::size_t d, double shift = 0.0, double scale = 1.0) {
    std::normal_distribution<double> z;
    Sample s(d);
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : p) {
            v = shift + scale * z(rng);
        }
        s.push_back(p);
    }
    return s;
}

TEST(DDPlot, IdenticalSamplesLieOnTheDiagonal) {
    std::mt19937_64 rng(1);
    const auto x = normal_sample(rng, 40, 2);
    const auto plot = dd_plot(x, x);
    ASSERT_EQ(plot.points.size(), 80u);
    for (const auto& [a, b] : plot.points) {
        EXPECT_EQ(a, b);
    }
}

TEST(DDPlot, HandPair) {
    const auto x = Sample::from_values(std::vector<double>{0.0, 2.0});
    const auto y = Sample::from_values(std::vector<double>{10.0, 12.0});
    const auto plot = dd_plot(x, y);
    EXPECT_NEAR(plot.points[0].first, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(plot.points[0].second, 1.0 / 13.0, 1e-15);
}

TEST(DDPlot, ShiftMovesMassOffTheDiagonal) {
    std::mt19937_64 rng(2);
    const auto x = normal_sample(rng, 200, 2);
    const auto same = normal_sample(rng, 200, 2);
    const auto shifted = normal_sample(rng, 200, 2, 2.0);
    auto max_gap = [](const DDPlot& p) {
        double g = 0.0;
        for (const auto& [a, b] : p.points) {
            g = std::max(g, std::abs(a - b));
        }
        return g;
    };
    EXPECT_GT(max_gap(dd_plot(x, shifted)), max_gap(dd_plot(x, same)));
}

TEST(DDPlot, DimensionMismatchThrows) {
    EXPECT_THROW(static_cast<void>(dd_plot(Sample::from_values(std::vector<double>{1.0}),
                                           Sample::from_rows({{1.0, 2.0}}))),
                 std::invalid_argument);
}

TEST(WeakRanks, TieSemantics) {
    const auto combined = Sample::from_values(std::vector<double>{0.0, 10.0});
    const double zero[1] = {0.0};
    const double ten[1] = {10.0};
    EXPECT_EQ(depth_rank(zero, combined), 2u);
    EXPECT_EQ(depth_rank(ten, combined), 2u);
}

TEST(WeakRanks, ShallowestPointHasRankOne) {
    const auto combined = Sample::from_values(std::vector<double>{0.0, 1.0, 2.0, 50.0});
    const double far[1] = {50.0};
    EXPECT_EQ(depth_rank(far, combined), 1u);
}

TEST(WeakRanks, MatchesQuadraticOracle) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> d(30);
        for (auto& v : d) {
            v = 0.1 * level(rng);  // many exact ties
        }
        const auto r = weak_ranks(d);
        EXPECT_EQ(r, oracle::weak_ranks(d));
    }
}

TEST(WeakRanks, DistinctDepthsGiveAPermutation) {
    std::mt19937_64 rng(4);
    const auto s = normal_sample(rng, 5, 2);
    const auto r = weak_ranks(depth::depth_all(s));
    std::vector<std::size_t> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(Wilcoxon, NullMoments) {
    const auto w = wilcoxon_moments(2, 3);
    EXPECT_DOUBLE_EQ(w.expected, 6.0);
    EXPECT_DOUBLE_EQ(w.variance, 3.0);
}

TEST(Wilcoxon, SymmetricSingletons) {
    const auto w = wilcoxon_statistic(Sample::from_values(std::vector<double>{0.0}),
                                      Sample::from_values(std::vector<double>{10.0}));
    EXPECT_DOUBLE_EQ(w.statistic, 2.0);
}

TEST(Wilcoxon, StatisticIsRankSumOfFirstSample) {
    std::mt19937_64 rng(5);
    const auto x = normal_sample(rng, 7, 2);
    const auto y = normal_sample(rng, 9, 2);
    const auto combined = x.concatenated(y);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < combined.size(); ++i) {
        rows.emplace_back(combined[i].begin(), combined[i].end());
    }
    std::vector<double> d;
    for (const auto& r : rows) {
        d.push_back(oracle::depth(r, rows, 2.0, 1.0, 1.0));
    }
    const auto ranks = oracle::weak_ranks(d);
    const double expected = std::accumulate(ranks.begin(), ranks.begin() + 7, 0.0);
    const auto w = wilcoxon_statistic(x, y);
    EXPECT_DOUBLE_EQ(w.statistic, expected);
    EXPECT_NEAR(w.zscore, (expected - 7.0 * 17.0 / 2.0) / std::sqrt(7.0 * 9.0 * 17.0 / 12.0), 1e-12);
}

TEST(Wilcoxon, ScaleInflationGivesLowRanks) {
    std::mt19937_64 rng(6);
    const auto x = normal_sample(rng, 100, 2, 0.0, 10.0);
    const auto y = normal_sample(rng, 100, 2);
    EXPECT_LT(wilcoxon_statistic(x, y).zscore, -5.0);
}

TEST(BootstrapRank, DeterministicInSeed) {
    std::mt19937_64 rng(7);
    const auto ref = normal_sample(rng, 120, 1);
    const double a = bootstrap_rank_critical(ref, 50, 50, 0.05, 200, 42);
    const double b = bootstrap_rank_critical(ref, 50, 50, 0.05, 200, 42);
    EXPECT_EQ(a, b);
}

TEST(BootstrapRank, LevelOneGivesSmallestAbsZ) {
    std::mt19937_64 rng(8);
    const auto ref = normal_sample(rng, 120, 1);
    const double high = bootstrap_rank_critical(ref, 50, 50, 0.05, 200, 1);
    const double low = bootstrap_rank_critical(ref, 50, 50, 0.999, 200, 1);
    EXPECT_LT(low, 0.1);
    EXPECT_GT(high, low);
}

TEST(BootstrapRank, NearNormalNullQuantile) {
    std::mt19937_64 rng(9);
    const auto ref = normal_sample(rng, 1000, 1);
    const double t = bootstrap_rank_critical(ref, 50, 50, 0.05, 2000, 3);
    EXPECT_NEAR(t, 1.96, 0.25);
}

TEST(BootstrapRank, PoolTooSmallThrows) {
    std::mt19937_64 rng(10);
    const auto ref = normal_sample(rng, 60, 1);
    EXPECT_THROW(static_cast<void>(bootstrap_rank_critical(ref, 50, 50, 0.05, 200, 1)), std::invalid_argument);
}

}  // namespace
}  // namespace depthmon::rank
