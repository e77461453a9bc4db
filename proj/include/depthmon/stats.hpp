#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small descriptive-statistics helpers shared by the estimators and simulators.
namespace depthmon::stats {

/// Consistency factor turning the raw MAD into a normal-consistent scale estimate.
inline constexpr double kMadToSigma = 1.482602218505602;

[[nodiscard]] double mean(std::span<const double> x);

/// Sample standard deviation (denominator n - 1); 0 for fewer than two values.
[[nodiscard]] double sd(std::span<const double> x);

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `prob` is clamped to [0, 1].
[[nodiscard]] double quantile(std::span<const double> x, double prob);

[[nodiscard]] double median(std::span<const double> x);

/// Raw median absolute deviation, without the normal-consistency factor.
[[nodiscard]] double mad_raw(std::span<const double> x);

/// MAD scaled to estimate the standard deviation under normality.
[[nodiscard]] double mad(std::span<const double> x);

[[nodiscard]] double iqr(std::span<const double> x);

/// `count` equally spaced points from lo to hi inclusive; the last point is exactly hi.
[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Trapezoid-rule integral of samples taken on an equally spaced grid with spacing `step`.
[[nodiscard]] double trapezoid(std::span<const double> values, double step);

}  // namespace depthmon::stats
