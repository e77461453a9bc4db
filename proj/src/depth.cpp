#include "depthmon/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace depthmon::depth {
namespace {

void require_nonempty(const Sample& sample) {
    if (sample.empty()) {
        throw std::invalid_argument("depth requires a nonempty sample");
    }
}

// Sum over j of ||x_i - x_j||_p for every i, using the symmetry of the distance.
std::vector<double> pairwise_distance_sums(const Sample& sample, double p) {
    const std::size_t n = sample.size();
    const std::size_t d = sample.dim();
    std::vector<double> sums(n, 0.0);

    // Coordinates column-major so the inner loop runs over contiguous memory.
    std::vector<double> cols(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            cols[k * n + i] = sample[i][k];
        }
    }

    std::vector<double> acc(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t len = n - i - 1;
        double* out = acc.data();
        std::fill_n(out, len, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            const double xi = cols[k * n + i];
            const double* col = cols.data() + k * n + i + 1;
            if (p == 2.0) {
                for (std::size_t j = 0; j < len; ++j) {
                    const double diff = col[j] - xi;
                    out[j] += diff * diff;
                }
            } else if (p == 1.0) {
                for (std::size_t j = 0; j < len; ++j) {
                    out[j] += std::abs(col[j] - xi);
                }
            } else if (std::isinf(p)) {
                for (std::size_t j = 0; j < len; ++j) {
                    out[j] = std::max(out[j], std::abs(col[j] - xi));
                }
            } else {
                for (std::size_t j = 0; j < len; ++j) {
                    out[j] += std::pow(std::abs(col[j] - xi), p);
                }
            }
        }
        if (p == 2.0) {
            for (std::size_t j = 0; j < len; ++j) {
                out[j] = std::sqrt(out[j]);
            }
        } else if (p != 1.0 && !std::isinf(p)) {
            for (std::size_t j = 0; j < len; ++j) {
                out[j] = std::pow(out[j], 1.0 / p);
            }
        }
        double row = 0.0;
        double* tail = sums.data() + i + 1;
        for (std::size_t j = 0; j < len; ++j) {
            row += out[j];
            tail[j] += out[j];
        }
        sums[i] += row;
    }
    return sums;
}

}  // namespace

void DepthParams::validate() const {
    if (!(p >= 1.0)) {
        throw std::invalid_argument("depth norm order p must be >= 1, got " + std::to_string(p));
    }
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("depth weight intercept a must be > 0, got " + std::to_string(a));
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("depth weight slope b must be > 0, got " + std::to_string(b));
    }
}

double lp_distance(std::span<const double> u, std::span<const double> v, double p) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("distance between points of different dimension");
    }
    if (p == 2.0) {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            s += (u[k] - v[k]) * (u[k] - v[k]);
        }
        return std::sqrt(s);
    }
    if (p == 1.0) {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            s += std::abs(u[k] - v[k]);
        }
        return s;
    }
    if (std::isinf(p)) {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            s = std::max(s, std::abs(u[k] - v[k]));
        }
        return s;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        s += std::pow(std::abs(u[k] - v[k]), p);
    }
    return std::pow(s, 1.0 / p);
}

double weighted_lp_depth(std::span<const double> z, const Sample& sample, const DepthParams& params) {
    params.validate();
    require_nonempty(sample);
    if (z.size() != sample.dim()) {
        throw std::invalid_argument("point dimension " + std::to_string(z.size()) +
                                    " does not match sample dimension " + std::to_string(sample.dim()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        total += params.weight(lp_distance(z, sample[i], params.p));
    }
    return 1.0 / (1.0 + total / static_cast<double>(sample.size()));
}

std::vector<double> depth_all(const Sample& sample, const DepthParams& params) {
    params.validate();
    require_nonempty(sample);
    const auto sums = pairwise_distance_sums(sample, params.p);
    const double n = static_cast<double>(sample.size());
    std::vector<double> depths(sums.size());
    // The self term contributes w(0) = a; the weight is affine, so the mean
    // weight is a + b * (mean distance).
    for (std::size_t i = 0; i < sums.size(); ++i) {
        depths[i] = 1.0 / (1.0 + params.a + params.b * sums[i] / n);
    }
    return depths;
}

std::vector<double> depth_against(const Sample& points, const Sample& reference, const DepthParams& params) {
    params.validate();
    require_nonempty(reference);
    if (!points.empty() && points.dim() != reference.dim()) {
        throw std::invalid_argument("dimension mismatch between points and reference sample");
    }
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = weighted_lp_depth(points[i], reference, params);
    }
    return out;
}

std::size_t deepest_index(std::span<const double> depths) {
    if (depths.empty()) {
        throw std::invalid_argument("deepest_index of an empty depth vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < depths.size(); ++i) {
        if (depths[i] > depths[best]) {
            best = i;
        }
    }
    return best;
}

std::vector<double> lp_median(const Sample& sample, const DepthParams& params) {
    const auto depths = depth_all(sample, params);
    const auto p = sample[deepest_index(depths)];
    return {p.begin(), p.end()};
}

CentralRegion central_region(std::span<const double> depths, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("central region level alpha must lie in [0, 1]");
    }
    CentralRegion region{alpha, {}};
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (depths[i] >= alpha) {
            region.members.push_back(i);
        }
    }
    return region;
}

CentralRegion central_region(const Sample& sample, const DepthParams& params, double alpha) {
    return central_region(depth_all(sample, params), alpha);
}

CentralRegion smallest_region_beta(std::span<const double> depths, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("region mass beta must lie in (0, 1], got " + std::to_string(beta));
    }
    if (depths.empty()) {
        throw std::invalid_argument("smallest_region_beta of an empty sample");
    }
    const std::size_t n = depths.size();
    // Guard against beta * n landing a rounding error above an integer.
    const double wanted = std::ceil(beta * static_cast<double>(n) - 1e-9);
    const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(wanted, 1.0)), 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return depths[l] > depths[r]; });

    CentralRegion region;
    region.alpha = depths[order[count - 1]];
    for (std::size_t i = 0; i < n; ++i) {
        if (depths[i] >= region.alpha) {
            region.members.push_back(i);
        }
    }
    return region;
}

CentralRegion smallest_region_beta(const Sample& sample, const DepthParams& params, double beta) {
    return smallest_region_beta(depth_all(sample, params), beta);
}

}  // namespace depthmon::depth
