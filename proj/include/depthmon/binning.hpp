#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "depthmon/depth.hpp"
#include "depthmon/window.hpp"

// Depth-based robust binning of lagged pairs.
//
// A shared grid of edges l_1 < ... < l_m defines, on each axis, the classes
// (-inf, l_1), [l_1, l_2), ..., [l_{m-1}, l_m), [l_m, inf). Pairs falling into
// an extreme class on either axis are trimmed; the (m-1)^2 interior cells are
// kept as midpoints with counts.
namespace depthmon::binning {

/// How `beta` selects the depth region the grid must cover.
enum class BetaMode {
    trim_mass,     ///< cover the deepest (1 - beta) of the pairs; beta is the trimmed share
    central_mass,  ///< cover the deepest beta of the pairs
};

[[nodiscard]] const char* to_string(BetaMode mode) noexcept;
[[nodiscard]] BetaMode beta_mode_from_string(const std::string& name);

/// Region mass implied by (beta, mode).
[[nodiscard]] double covered_mass(double beta, BetaMode mode);

/// Default number of edges for windows up to 10000 observations.
inline constexpr std::size_t kDefaultEdges = 100;

struct Grid2D {
    std::vector<double> edges;  ///< l_1 .. l_m, equally spaced, shared by both axes

    [[nodiscard]] std::size_t edge_count() const noexcept { return edges.size(); }
    [[nodiscard]] std::size_t interior_bins() const noexcept { return edges.size() - 1; }
    [[nodiscard]] double spacing() const noexcept { return (edges.back() - edges.front()) / static_cast<double>(edges.size() - 1); }

    /// Class of `v` on one axis: 0 for (-inf, l_1), j for [l_j, l_{j+1}), m for [l_m, inf).
    [[nodiscard]] std::size_t axis_class(double v) const noexcept;
};

/// Equally spaced grid with `edge_count >= 3` edges spanning [lo, hi], lo < hi.
[[nodiscard]] Grid2D make_grid(double lo, double hi, std::size_t edge_count);

struct BinnedSample {
    std::vector<double> midpoints_x;           ///< m - 1 interior midpoints
    std::vector<double> midpoints_y;           ///< same values as midpoints_x (shared grid)
    std::vector<std::size_t> joint_counts;     ///< (m-1) x (m-1), row = x bin, column = y bin
    std::vector<std::size_t> marginal_x;       ///< row sums of joint_counts
    std::vector<std::size_t> marginal_y;       ///< column sums of joint_counts
    std::size_t total_interior = 0;
    std::size_t trimmed_count = 0;             ///< pairs in an extreme class on either axis

    [[nodiscard]] std::size_t bins() const noexcept { return midpoints_x.size(); }
    [[nodiscard]] std::size_t count(std::size_t ix, std::size_t iy) const noexcept {
        return joint_counts[ix * bins() + iy];
    }
};

/// Grid covering the depth region of the pairs selected by (beta, mode).
/// Throws NumericalError("zero-width grid") when the region collapses to a point.
[[nodiscard]] Grid2D depth_grid(const core::LaggedPairs& pairs, const depth::DepthParams& params, double beta,
                                std::size_t edge_count, BetaMode mode = BetaMode::trim_mass);

/// Same, from depths already computed on the pairs.
[[nodiscard]] Grid2D depth_grid(const core::LaggedPairs& pairs, std::span<const double> depths, double beta,
                                std::size_t edge_count, BetaMode mode = BetaMode::trim_mass);

/// Counts pairs per interior cell; pairs in extreme classes go to trimmed_count.
[[nodiscard]] BinnedSample bin2d(const core::LaggedPairs& pairs, const Grid2D& grid);

/// depth_grid followed by bin2d. Throws NumericalError("empty binned sample")
/// when every pair is trimmed.
[[nodiscard]] BinnedSample robust_bin(const core::LaggedPairs& pairs, const depth::DepthParams& params,
                                      double beta, std::size_t edge_count, BetaMode mode = BetaMode::trim_mass);

/// CSV triplets (mid_x, mid_y, count) for the nonzero cells, preceded by a
/// single `# {json}` metadata line.
void write_binned_csv(std::ostream& out, const BinnedSample& binned, double beta, BetaMode mode);

}  // namespace depthmon::binning
