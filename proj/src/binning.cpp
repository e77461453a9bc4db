#include "depthmon/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "depthmon/csv.hpp"
#include "depthmon/error.hpp"

namespace depthmon::binning {

const char* to_string(BetaMode mode) noexcept {
    return mode == BetaMode::trim_mass ? "trim_mass" : "central_mass";
}

BetaMode beta_mode_from_string(const std::string& name) {
    if (name == "trim_mass") {
        return BetaMode::trim_mass;
    }
    if (name == "central_mass") {
        return BetaMode::central_mass;
    }
    throw std::invalid_argument("unknown beta_mode '" + name + "' (expected trim_mass or central_mass)");
}

double covered_mass(double beta, BetaMode mode) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("binning beta must lie in (0, 1), got " + std::to_string(beta));
    }
    return mode == BetaMode::trim_mass ? 1.0 - beta : beta;
}

std::size_t Grid2D::axis_class(double v) const noexcept {
    const std::size_t m = edges.size();
    if (v < edges.front()) {
        return 0;
    }
    if (v >= edges.back()) {
        return m;
    }
    const double step = spacing();
    auto j = static_cast<std::size_t>(std::floor((v - edges.front()) / step)) + 1;
    j = std::clamp<std::size_t>(j, 1, m - 1);
    // The floor can land one class off for values on (or a rounding error from) an edge.
    while (j > 1 && v < edges[j - 1]) {
        --j;
    }
    while (j < m - 1 && v >= edges[j]) {
        ++j;
    }
    return j;
}

Grid2D make_grid(double lo, double hi, std::size_t edge_count) {
    if (edge_count < 3) {
        throw std::invalid_argument("grid needs at least 3 edges, got " + std::to_string(edge_count));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("grid bounds must be finite");
    }
    if (!(hi > lo)) {
        throw NumericalError("zero-width grid");
    }
    Grid2D grid;
    grid.edges.resize(edge_count);
    const double step = (hi - lo) / static_cast<double>(edge_count - 1);
    for (std::size_t j = 0; j < edge_count; ++j) {
        grid.edges[j] = lo + step * static_cast<double>(j);
    }
    grid.edges.back() = hi;
    return grid;
}

Grid2D depth_grid(const core::LaggedPairs& pairs, std::span<const double> depths, double beta,
                  std::size_t edge_count, BetaMode mode) {
    if (pairs.size() < edge_count) {
        throw std::invalid_argument("depth_grid needs at least as many pairs (" + std::to_string(pairs.size()) +
                                    ") as grid edges (" + std::to_string(edge_count) + ")");
    }
    if (depths.size() != pairs.size()) {
        throw std::invalid_argument("depth vector does not match the pairs");
    }
    const auto region = depth::smallest_region_beta(depths, covered_mass(beta, mode));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : region.members) {
        const auto& p = pairs.pairs[idx];
        lo = std::min({lo, p[0], p[1]});
        hi = std::max({hi, p[0], p[1]});
    }
    return make_grid(lo, hi, edge_count);
}

Grid2D depth_grid(const core::LaggedPairs& pairs, const depth::DepthParams& params, double beta,
                  std::size_t edge_count, BetaMode mode) {
    static_cast<void>(covered_mass(beta, mode));
    if (pairs.size() < edge_count) {
        throw std::invalid_argument("depth_grid needs at least as many pairs (" + std::to_string(pairs.size()) +
                                    ") as grid edges (" + std::to_string(edge_count) + ")");
    }
    const auto depths = depth::depth_all(pairs.as_sample(), params);
    return depth_grid(pairs, depths, beta, edge_count, mode);
}

BinnedSample bin2d(const core::LaggedPairs& pairs, const Grid2D& grid) {
    const std::size_t m = grid.edge_count();
    if (m < 3) {
        throw std::invalid_argument("grid needs at least 3 edges");
    }
    const std::size_t bins = m - 1;
    BinnedSample out;
    out.midpoints_x.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        out.midpoints_x[j] = 0.5 * (grid.edges[j] + grid.edges[j + 1]);
    }
    out.midpoints_y = out.midpoints_x;
    out.joint_counts.assign(bins * bins, 0);
    out.marginal_x.assign(bins, 0);
    out.marginal_y.assign(bins, 0);

    for (const auto& p : pairs.pairs) {
        const std::size_t cx = grid.axis_class(p[0]);
        const std::size_t cy = grid.axis_class(p[1]);
        if (cx == 0 || cx == m || cy == 0 || cy == m) {
            ++out.trimmed_count;
            continue;
        }
        ++out.joint_counts[(cx - 1) * bins + (cy - 1)];
        ++out.marginal_x[cx - 1];
        ++out.marginal_y[cy - 1];
        ++out.total_interior;
    }
    return out;
}

BinnedSample robust_bin(const core::LaggedPairs& pairs, const depth::DepthParams& params, double beta,
                        std::size_t edge_count, BetaMode mode) {
    const auto grid = depth_grid(pairs, params, beta, edge_count, mode);
    auto binned = bin2d(pairs, grid);
    if (binned.total_interior == 0) {
        throw NumericalError("empty binned sample");
    }
    return binned;
}

void write_binned_csv(std::ostream& out, const BinnedSample& binned, double beta, BetaMode mode) {
    nlohmann::json meta = {
        {"beta", beta},
        {"beta_mode", to_string(mode)},
        {"m", binned.bins() + 1},
        {"trimmed_count", binned.trimmed_count},
        {"total_interior", binned.total_interior},
    };
    out << "# " << meta.dump() << '\n';
    out << "mid_x,mid_y,count\n";
    for (std::size_t ix = 0; ix < binned.bins(); ++ix) {
        for (std::size_t iy = 0; iy < binned.bins(); ++iy) {
            if (const auto c = binned.count(ix, iy); c > 0) {
                out << core::format_double(binned.midpoints_x[ix]) << ','
                    << core::format_double(binned.midpoints_y[iy]) << ',' << c << '\n';
            }
        }
    }
}

}  // namespace depthmon::binning
