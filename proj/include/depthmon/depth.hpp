#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depthmon/sample.hpp"

// Weighted L^p depth with the linear weight w(x) = a + b*x:
//
//     D(z; X) = 1 / (1 + mean_i w(||z - x_i||_p))
//
// Values lie in (0, 1/(1+a)]; deeper points are more central.
namespace depthmon::depth {

struct DepthParams {
    double p = 2.0;  ///< norm order, p >= 1 (infinity selects the max-norm)
    double a = 1.0;  ///< weight intercept, a > 0
    double b = 1.0;  ///< weight slope, b > 0

    /// Throws std::invalid_argument unless p >= 1, a > 0, b > 0.
    void validate() const;

    [[nodiscard]] double weight(double distance) const noexcept { return a + b * distance; }
    [[nodiscard]] double max_depth() const noexcept { return 1.0 / (1.0 + a); }
};

[[nodiscard]] double lp_distance(std::span<const double> u, std::span<const double> v, double p);

/// Empirical depth of `z` with respect to `sample`.
[[nodiscard]] double weighted_lp_depth(std::span<const double> z, const Sample& sample,
                                       const DepthParams& params = {});

/// Depth of every sample point with respect to the sample itself, O(n^2 d).
[[nodiscard]] std::vector<double> depth_all(const Sample& sample, const DepthParams& params = {});

/// Depth of every point of `points` with respect to `reference`.
[[nodiscard]] std::vector<double> depth_against(const Sample& points, const Sample& reference,
                                                const DepthParams& params = {});

/// Index of the largest depth, lowest index on ties.
[[nodiscard]] std::size_t deepest_index(std::span<const double> depths);

/// Sample point of maximal depth (the sample-restricted L^p median).
[[nodiscard]] std::vector<double> lp_median(const Sample& sample, const DepthParams& params = {});

struct CentralRegion {
    double alpha = 0.0;
    std::vector<std::size_t> members;  ///< sample indices, ascending
};

/// Points with depth >= alpha, alpha in [0, 1].
[[nodiscard]] CentralRegion central_region(std::span<const double> depths, double alpha);
[[nodiscard]] CentralRegion central_region(const Sample& sample, const DepthParams& params, double alpha);

/// Smallest central region holding at least a fraction `beta` of the sample:
/// the ceil(beta * n) deepest points plus any point tied with the last one.
[[nodiscard]] CentralRegion smallest_region_beta(std::span<const double> depths, double beta);
[[nodiscard]] CentralRegion smallest_region_beta(const Sample& sample, const DepthParams& params, double beta);

}  // namespace depthmon::depth
