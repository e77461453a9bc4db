#include "depthmon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace depthmon::stats {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean of empty sequence");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mu) * (v - mu);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::span<const double> x, double prob) {
    if (x.empty()) {
        throw std::invalid_argument("quantile of empty sequence");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    prob = std::clamp(prob, 0.0, 1.0);
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double mad_raw(std::span<const double> x) {
    const double med = median(x);
    std::vector<double> dev(x.size());
    std::transform(x.begin(), x.end(), dev.begin(), [med](double v) { return std::abs(v - med); });
    return median(dev);
}

double mad(std::span<const double> x) { return kMadToSigma * mad_raw(x); }

double iqr(std::span<const double> x) { return quantile(x, 0.75) - quantile(x, 0.25); }

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count == 0) {
        return {};
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

double trapezoid(std::span<const double> values, double step) {
    if (values.size() < 2) {
        return 0.0;
    }
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        sum += values[i];
    }
    return sum * step;
}

}  // namespace depthmon::stats
