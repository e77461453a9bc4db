#pragma once

#include <span>
#include <string>

#include "depthmon/cde.hpp"

// Discrepancies between density rows sampled on a shared, equally spaced grid.
namespace depthmon::monitor {

enum class DistanceKind { hellinger, kolmogorov, abs_dev };

[[nodiscard]] const char* to_string(DistanceKind kind) noexcept;
[[nodiscard]] DistanceKind distance_kind_from_string(const std::string& name);

/// sqrt(1 - sum sqrt(f g) * step) after renormalizing both rows to unit
/// Riemann mass; clamped to [0, 1]. Throws NumericalError when a row has zero mass.
[[nodiscard]] double hellinger(std::span<const double> f, std::span<const double> g, double step);

/// Largest gap between the cumulative Riemann sums of the renormalized rows.
[[nodiscard]] double kolmogorov(std::span<const double> f, std::span<const double> g, double step);

/// Sum of absolute differences at the grid points, unweighted.
[[nodiscard]] double abs_dev(std::span<const double> f, std::span<const double> g);

[[nodiscard]] double distance(DistanceKind kind, std::span<const double> f, std::span<const double> g, double step);

/// Mean row distance between two estimates on the same condition points and y grid.
/// Throws std::invalid_argument when the grids differ.
[[nodiscard]] double distance(DistanceKind kind, const cde::DensityEstimate& a, const cde::DensityEstimate& b);

/// Throws std::invalid_argument unless both estimates share condition points and y grid.
void require_aligned(const cde::DensityEstimate& a, const cde::DensityEstimate& b);

}  // namespace depthmon::monitor
