#include "depthmon/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "depthmon/error.hpp"

namespace depthmon::monitor {
namespace {

void require_same_size(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size() || f.empty()) {
        throw std::invalid_argument("density rows must be nonempty and share a grid (sizes " +
                                    std::to_string(f.size()) + " and " + std::to_string(g.size()) + ")");
    }
}

void require_step(double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("grid step must be positive");
    }
}

double mass(std::span<const double> f) {
    double total = 0.0;
    for (double v : f) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw std::invalid_argument("density values must be finite and nonnegative");
        }
        total += v;
    }
    if (!(total > 0.0)) {
        throw NumericalError("density row has zero mass");
    }
    return total;
}

bool same_grid(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-9 * std::max({1.0, std::abs(a[i]), std::abs(b[i])})) {
            return false;
        }
    }
    return true;
}

}  // namespace

const char* to_string(DistanceKind kind) noexcept {
    switch (kind) {
        case DistanceKind::hellinger:
            return "hellinger";
        case DistanceKind::kolmogorov:
            return "kolmogorov";
        case DistanceKind::abs_dev:
            return "abs_dev";
    }
    return "unknown";
}

DistanceKind distance_kind_from_string(const std::string& name) {
    for (auto kind : {DistanceKind::hellinger, DistanceKind::kolmogorov, DistanceKind::abs_dev}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown distance '" + name + "' (expected hellinger, kolmogorov or abs_dev)");
}

double hellinger(std::span<const double> f, std::span<const double> g, double step) {
    require_same_size(f, g);
    require_step(step);
    const double sf = std::sqrt(mass(f));
    const double sg = std::sqrt(mass(g));
    // 1 - sum sqrt(p q) written as half the squared distance between root
    // masses, which is exactly zero for identical rows. The step cancels.
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = std::sqrt(f[i]) / sf - std::sqrt(g[i]) / sg;
        sum += d * d;
    }
    return std::sqrt(std::clamp(0.5 * sum, 0.0, 1.0));
}

double kolmogorov(std::span<const double> f, std::span<const double> g, double step) {
    require_same_size(f, g);
    require_step(step);
    const double mf = mass(f);
    const double mg = mass(g);
    double cf = 0.0;
    double cg = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        cf += f[i];
        cg += g[i];
        sup = std::max(sup, std::abs(cf / mf - cg / mg));
    }
    return std::min(sup, 1.0);
}

double abs_dev(std::span<const double> f, std::span<const double> g) {
    require_same_size(f, g);
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += std::abs(f[i] - g[i]);
    }
    return total;
}

double distance(DistanceKind kind, std::span<const double> f, std::span<const double> g, double step) {
    switch (kind) {
        case DistanceKind::hellinger:
            return hellinger(f, g, step);
        case DistanceKind::kolmogorov:
            return kolmogorov(f, g, step);
        case DistanceKind::abs_dev:
            return abs_dev(f, g);
    }
    throw std::invalid_argument("unknown distance kind");
}

void require_aligned(const cde::DensityEstimate& a, const cde::DensityEstimate& b) {
    if (!same_grid(a.y_grid, b.y_grid)) {
        throw std::invalid_argument("density estimates use different y grids");
    }
    if (!same_grid(a.condition_points, b.condition_points)) {
        throw std::invalid_argument("density estimates use different condition points");
    }
}

double distance(DistanceKind kind, const cde::DensityEstimate& a, const cde::DensityEstimate& b) {
    require_aligned(a, b);
    if (a.rows() == 0) {
        throw std::invalid_argument("density estimates have no rows");
    }
    double total = 0.0;
    for (std::size_t l = 0; l < a.rows(); ++l) {
        total += distance(kind, a.row(l), b.row(l), a.grid_step());
    }
    return total / static_cast<double>(a.rows());
}

}  // namespace depthmon::monitor
