#include "depthmon/rank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "depthmon/random.hpp"
#include "depthmon/stats.hpp"

namespace depthmon::rank {
namespace {

void require_compatible(const Sample& x, const Sample& y) {
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("two-sample depth statistics require nonempty samples");
    }
    if (x.dim() != y.dim()) {
        throw std::invalid_argument("sample dimensions differ: " + std::to_string(x.dim()) + " vs " +
                                    std::to_string(y.dim()));
    }
}

double tie_ceiling(double depth) { return depth + kTieTolerance * std::abs(depth); }

std::vector<double> ranking_depths(const Sample& x, const Sample& y, const depth::DepthParams& params,
                                   RankBasis basis) {
    const Sample combined = x.concatenated(y);
    switch (basis) {
        case RankBasis::combined:
            return depth::depth_all(combined, params);
        case RankBasis::first:
            return depth::depth_against(combined, x, params);
        case RankBasis::second:
            return depth::depth_against(combined, y, params);
    }
    return {};
}

}  // namespace

DDPlot dd_plot(const Sample& x, const Sample& y, const depth::DepthParams& params) {
    require_compatible(x, y);
    const Sample combined = x.concatenated(y);
    const auto wrt_x = depth::depth_against(combined, x, params);
    const auto wrt_y = depth::depth_against(combined, y, params);
    DDPlot plot;
    plot.n = x.size();
    plot.m = y.size();
    plot.points.reserve(combined.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        plot.points.emplace_back(wrt_x[i], wrt_y[i]);
    }
    return plot;
}

std::vector<std::size_t> weak_ranks(std::span<const double> depths) {
    std::vector<double> sorted(depths.begin(), depths.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> ranks(depths.size());
    for (std::size_t i = 0; i < depths.size(); ++i) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), tie_ceiling(depths[i]));
        ranks[i] = static_cast<std::size_t>(it - sorted.begin());
    }
    return ranks;
}

std::size_t depth_rank(std::span<const double> x, const Sample& combined, const depth::DepthParams& params) {
    if (combined.empty() || x.size() != combined.dim()) {
        throw std::invalid_argument("depth_rank: point dimension does not match the combined sample");
    }
    std::size_t position = combined.size();
    for (std::size_t i = 0; i < combined.size(); ++i) {
        const auto z = combined[i];
        if (std::equal(z.begin(), z.end(), x.begin())) {
            position = i;
            break;
        }
    }
    if (position == combined.size()) {
        throw std::invalid_argument("depth_rank: point is not an element of the combined sample");
    }
    const auto depths = depth::depth_all(combined, params);
    return weak_ranks(depths)[position];
}

WilcoxonResult wilcoxon_moments(std::size_t m, std::size_t n) {
    WilcoxonResult r;
    r.m = m;
    r.n = n;
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    r.expected = 0.5 * md * (md + nd + 1.0);
    r.variance = md * nd * (md + nd + 1.0) / 12.0;
    return r;
}

WilcoxonResult wilcoxon_statistic(const Sample& x, const Sample& y, const depth::DepthParams& params,
                                  RankBasis basis) {
    require_compatible(x, y);
    const auto depths = ranking_depths(x, y, params, basis);
    const auto ranks = weak_ranks(depths);
    WilcoxonResult r = wilcoxon_moments(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += static_cast<double>(ranks[i]);
    }
    r.statistic = s;
    r.zscore = r.variance > 0.0 ? (s - r.expected) / std::sqrt(r.variance) : 0.0;
    return r;
}

double bootstrap_rank_critical(const Sample& reference, std::size_t m, std::size_t n, double level,
                               std::size_t replicates, std::uint64_t seed, const depth::DepthParams& params,
                               RankBasis basis) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("bootstrap level must lie in (0, 1)");
    }
    if (replicates < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 replicates");
    }
    if (m == 0 || n == 0) {
        throw std::invalid_argument("bootstrap sample sizes must be positive");
    }
    if (reference.size() < m + n) {
        throw std::invalid_argument("reference of length " + std::to_string(reference.size()) +
                                    " is shorter than m + n = " + std::to_string(m + n));
    }
    // Each replicate splits a random subset of m + n distinct reference points,
    // so resampling introduces no artificial ties.
    std::vector<std::size_t> order(reference.size());
    std::vector<double> abs_z(replicates);
    for (std::size_t b = 0; b < replicates; ++b) {
        Rng rng = make_substream(seed, b);
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        for (std::size_t i = 0; i < m + n; ++i) {
            const auto j = std::uniform_int_distribution<std::size_t>(i, order.size() - 1)(rng);
            std::swap(order[i], order[j]);
        }
        Sample xs(reference.dim());
        Sample ys(reference.dim());
        xs.reserve(m);
        ys.reserve(n);
        for (std::size_t i = 0; i < m; ++i) {
            xs.push_back(reference[order[i]]);
        }
        for (std::size_t i = m; i < m + n; ++i) {
            ys.push_back(reference[order[i]]);
        }
        abs_z[b] = std::abs(wilcoxon_statistic(xs, ys, params, basis).zscore);
    }
    return stats::quantile(abs_z, 1.0 - level);
}

}  // namespace depthmon::rank
