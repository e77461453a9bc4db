#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "depthmon/depth.hpp"
#include "depthmon/sample.hpp"

namespace depthmon::rank {

/// Sample DD-plot: for each z in X followed by each z in Y, the pair
/// (depth of z w.r.t. X, depth of z w.r.t. Y).
struct DDPlot {
    std::vector<std::pair<double, double>> points;
    std::size_t n = 0;  ///< size of the first sample
    std::size_t m = 0;  ///< size of the second sample
};

[[nodiscard]] DDPlot dd_plot(const Sample& x, const Sample& y, const depth::DepthParams& params = {});

/// Which empirical distribution the depths used for ranking are computed from.
enum class RankBasis { combined, first, second };

/// Relative tolerance under which two depth values count as tied. Exact
/// duplicates always tie; the tolerance absorbs rounding in symmetric layouts.
inline constexpr double kTieTolerance = 1e-12;

/// Weak-inequality ranks: rank_i = #{j : depth_j <= depth_i}. Tied values
/// share the largest rank of their group.
[[nodiscard]] std::vector<std::size_t> weak_ranks(std::span<const double> depths);

/// Rank of `x` within `combined`, depths computed w.r.t. `combined`.
/// Throws std::invalid_argument when x is not an element of combined.
[[nodiscard]] std::size_t depth_rank(std::span<const double> x, const Sample& combined,
                                     const depth::DepthParams& params = {});

struct WilcoxonResult {
    double statistic = 0.0;  ///< S, sum of the first sample's ranks
    std::size_t m = 0;       ///< size of the first sample (whose ranks are summed)
    std::size_t n = 0;       ///< size of the second sample
    double expected = 0.0;   ///< m (m + n + 1) / 2
    double variance = 0.0;   ///< m n (m + n + 1) / 12
    double zscore = 0.0;     ///< (S - expected) / sqrt(variance)
};

/// Null moments of S for sample sizes (m, n).
[[nodiscard]] WilcoxonResult wilcoxon_moments(std::size_t m, std::size_t n);

/// Depth-based Wilcoxon rank-sum statistic of `x` within the combined sample x followed by y.
[[nodiscard]] WilcoxonResult wilcoxon_statistic(const Sample& x, const Sample& y,
                                                const depth::DepthParams& params = {},
                                                RankBasis basis = RankBasis::combined);

/// (1 - level) quantile of |z| over B resampled pairs of size-m and size-n
/// samples, drawn without replacement from `reference` (which must hold at
/// least m + n points). Deterministic in `seed`.
[[nodiscard]] double bootstrap_rank_critical(const Sample& reference, std::size_t m, std::size_t n,
                                             double level, std::size_t replicates, std::uint64_t seed,
                                             const depth::DepthParams& params = {},
                                             RankBasis basis = RankBasis::combined);

}  // namespace depthmon::rank
