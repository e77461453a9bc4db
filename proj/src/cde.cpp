#include "depthmon/cde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "depthmon/csv.hpp"
#include "depthmon/error.hpp"
#include "depthmon/stats.hpp"

namespace depthmon::cde {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kPivotTolerance = 1e-10;
constexpr double kFitEtaClamp = 300.0;
constexpr std::size_t kMaxFitIterations = 50;
constexpr double kNegligibleLevel = 1e-8;
constexpr double kNegligibleLogRatio = -18.420680743952367;  // log(1e-8)

// Data reduced to distinct condition positions: x_s with count n_s and the
// kernel-smoothed responses g_s(y_g) = sum over the points at x_s of K_hy(Y - y_g).
struct Supports {
    std::vector<double> x;
    std::vector<double> count;
    std::vector<double> response;  // support-major, grid_size columns
    std::size_t grid_size = 0;

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
    [[nodiscard]] double g(std::size_t s, std::size_t col) const noexcept { return response[s * grid_size + col]; }
};

Supports supports_from_binned(const binning::BinnedSample& binned, std::span<const double> y_grid, double hy) {
    const std::size_t bins = binned.bins();
    const std::size_t cols = y_grid.size();
    std::vector<double> ky(bins * cols, 0.0);
    for (std::size_t j = 0; j < bins; ++j) {
        if (binned.marginal_y[j] == 0) {
            continue;
        }
        for (std::size_t g = 0; g < cols; ++g) {
            ky[j * cols + g] = gaussian_kernel(binned.midpoints_y[j] - y_grid[g], hy);
        }
    }
    Supports s;
    s.grid_size = cols;
    for (std::size_t i = 0; i < bins; ++i) {
        if (binned.marginal_x[i] == 0) {
            continue;
        }
        s.x.push_back(binned.midpoints_x[i]);
        s.count.push_back(static_cast<double>(binned.marginal_x[i]));
        const std::size_t offset = s.response.size();
        s.response.resize(offset + cols, 0.0);
        for (std::size_t j = 0; j < bins; ++j) {
            const auto c = binned.count(i, j);
            if (c == 0) {
                continue;
            }
            const double cd = static_cast<double>(c);
            for (std::size_t g = 0; g < cols; ++g) {
                s.response[offset + g] += cd * ky[j * cols + g];
            }
        }
    }
    return s;
}

Supports supports_from_pairs(const core::LaggedPairs& pairs, std::span<const double> y_grid, double hy) {
    Supports s;
    s.grid_size = y_grid.size();
    s.x.reserve(pairs.size());
    s.count.assign(pairs.size(), 1.0);
    s.response.resize(pairs.size() * y_grid.size());
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        s.x.push_back(pairs.pairs[t][0]);
        for (std::size_t g = 0; g < y_grid.size(); ++g) {
            s.response[t * y_grid.size() + g] = gaussian_kernel(pairs.pairs[t][1] - y_grid[g], hy);
        }
    }
    return s;
}

// Gaussian x-weights at one condition point, scaled so the largest equals 1.
// Every estimator below is invariant to a common factor in the weights.
struct ConditionWeights {
    std::vector<double> u;  // (x_s - x) / hx
    std::vector<double> k;  // shifted kernel weight
};

ConditionWeights condition_weights(const Supports& s, double x, double hx) {
    ConditionWeights cw;
    cw.u.resize(s.size());
    cw.k.resize(s.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        cw.u[i] = (s.x[i] - x) / hx;
        top = std::max(top, -0.5 * cw.u[i] * cw.u[i]);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        cw.k[i] = std::exp(-0.5 * cw.u[i] * cw.u[i] - top);
    }
    return cw;
}

using Mat3 = std::array<double, 9>;
using Vec3 = std::array<double, 3>;

// Solves the n x n (n <= 3) symmetric system a * x = b in place by Cholesky.
// Returns false when a pivot falls below kPivotTolerance times its diagonal.
bool cholesky_solve(Mat3 a, std::size_t n, Vec3& b) {
    Mat3 l{};
    for (std::size_t j = 0; j < n; ++j) {
        const double diag = a[j * 3 + j];
        double d = diag;
        for (std::size_t k = 0; k < j; ++k) {
            d -= l[j * 3 + k] * l[j * 3 + k];
        }
        if (!(diag > 0.0) || !(d > kPivotTolerance * diag) || !std::isfinite(d)) {
            return false;
        }
        l[j * 3 + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * 3 + j];
            for (std::size_t k = 0; k < j; ++k) {
                v -= l[i * 3 + k] * l[j * 3 + k];
            }
            l[i * 3 + j] = v / l[j * 3 + j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            v -= l[i * 3 + k] * b[k];
        }
        b[i] = v / l[i * 3 + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            v -= l[k * 3 + i] * b[k];
        }
        b[i] = v / l[i * 3 + i];
    }
    return true;
}

double power(double u, std::size_t k) noexcept {
    return k == 0 ? 1.0 : (k == 1 ? u : u * u);
}

// First row of the inverse weighted design moment matrix, so that the fitted
// intercept is sum_s k_s * (v0 + v1 u_s + v2 u_s^2) * g_s(y).
std::optional<Vec3> intercept_row(const ConditionWeights& cw, const Supports& s, std::size_t p) {
    Mat3 a{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = s.count[i] * cw.k[i];
        if (w == 0.0) {
            continue;
        }
        double up = w;
        std::array<double, 5> moments{};
        for (std::size_t m = 0; m < 2 * p - 1; ++m) {
            moments[m] = up;
            up *= cw.u[i];
        }
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) {
                a[r * 3 + c] += moments[r + c];
            }
        }
    }
    Vec3 v{1.0, 0.0, 0.0};
    if (!cholesky_solve(a, p, v)) {
        return std::nullopt;
    }
    return v;
}

struct ResolvedRow {
    std::vector<double> equivalent;  // per-support intercept weights
    std::size_t degree = 0;
    bool fallback = false;
};

ResolvedRow resolve_row(const ConditionWeights& cw, const Supports& s, int degree) {
    ResolvedRow row;
    row.degree = static_cast<std::size_t>(degree);
    auto v = intercept_row(cw, s, row.degree + 1);
    if (!v) {
        row.fallback = row.degree > 0;
        row.degree = 0;
        v = intercept_row(cw, s, 1);
        if (!v) {
            throw NumericalError("local polynomial design has no weight at the condition point");
        }
    }
    row.equivalent.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double poly = 0.0;
        for (std::size_t k = 0; k <= row.degree; ++k) {
            poly += (*v)[k] * power(cw.u[i], k);
        }
        row.equivalent[i] = cw.k[i] * poly;
    }
    return row;
}

double linear_intercept(const ResolvedRow& row, const Supports& s, std::size_t col) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += row.equivalent[i] * s.g(i, col);
    }
    return acc;
}

// Weighted nonlinear least squares of the mean responses on exp(theta . (1, u, u^2)),
// solved by Levenberg-Marquardt from the degree-0 solution (or a warm start).
class ExpLinkFit {
public:
    ExpLinkFit(const ConditionWeights& cw, const Supports& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double w = s.count[i] * cw.k[i];
            if (w > 0.0) {
                active_.push_back(i);
                w_.push_back(w);
                u_.push_back(cw.u[i]);
            }
        }
        gbar_.resize(active_.size());
        f_.resize(active_.size());
        trial_.resize(active_.size());
    }

    // Returns exp(theta0) for column `col`; `theta` carries the solution across calls.
    double fit(const Supports& s, std::size_t col, std::size_t p, Vec3& theta) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const std::size_t i = active_[a];
            gbar_[a] = s.g(i, col) / s.count[i];
            num += w_[a] * gbar_[a];
            den += w_[a];
        }
        const double level = num / den;
        if (!(level > 0.0)) {
            theta = {0.0, 0.0, 0.0};
            return 0.0;
        }
        if (p == 1) {
            theta = {std::log(level), 0.0, 0.0};
            return level;
        }
        const Vec3 cold{std::log(level), 0.0, 0.0};
        double f_cold = objective(cold, p, f_);
        Vec3 warm = theta;
        warm[0] = std::log(level);
        const double f_warm = std::isfinite(theta[1]) ? objective(warm, p, trial_) : f_cold + 1.0;
        if (f_warm < f_cold) {
            theta = warm;
            f_cold = f_warm;
            std::swap(f_, trial_);
        } else {
            theta = cold;
        }
        double current = f_cold;
        const double log_floor = std::log(level) + kNegligibleLogRatio;
        double lambda = 1e-3;
        for (std::size_t it = 0; it < kMaxFitIterations; ++it) {
            Mat3 h{};
            Vec3 grad{};
            for (std::size_t a = 0; a < active_.size(); ++a) {
                const double r = gbar_[a] - f_[a];
                Vec3 j{};
                for (std::size_t k = 0; k < p; ++k) {
                    j[k] = f_[a] * power(u_[a], k);
                }
                for (std::size_t r1 = 0; r1 < p; ++r1) {
                    grad[r1] += w_[a] * j[r1] * r;
                    for (std::size_t c = 0; c < p; ++c) {
                        h[r1 * 3 + c] += w_[a] * j[r1] * j[c];
                    }
                }
            }
            bool improved = false;
            double next = current;
            Vec3 step{};
            while (lambda < 1e12) {
                Mat3 damped = h;
                for (std::size_t k = 0; k < p; ++k) {
                    damped[k * 3 + k] *= 1.0 + lambda;
                }
                step = grad;
                if (!cholesky_solve(damped, p, step)) {
                    lambda *= 10.0;
                    continue;
                }
                Vec3 candidate = theta;
                for (std::size_t k = 0; k < p; ++k) {
                    candidate[k] += step[k];
                }
                next = objective(candidate, p, trial_);
                if (next < current) {
                    theta = candidate;
                    std::swap(f_, trial_);
                    lambda = std::max(lambda * 0.1, 1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!improved) {
                break;
            }
            const double gain = current - next;
            current = next;
            double largest = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                largest = std::max(largest, std::abs(step[k]));
            }
            // A fit escaping to a steep exponential drives the intercept to zero; stop
            // once it is negligible next to the local mean response.
            if (gain <= 1e-12 * current || largest < 1e-8 || theta[0] < log_floor) {
                break;
            }
        }
        return link_positive(theta[0]);
    }

private:
    double objective(const Vec3& theta, std::size_t p, std::vector<double>& fitted) const {
        double total = 0.0;
        for (std::size_t a = 0; a < active_.size(); ++a) {
            double eta = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                eta += theta[k] * power(u_[a], k);
            }
            fitted[a] = std::exp(std::clamp(eta, -kFitEtaClamp, kFitEtaClamp));
            const double r = gbar_[a] - fitted[a];
            total += w_[a] * r * r;
        }
        return total;
    }

    std::vector<std::size_t> active_;
    std::vector<double> w_;
    std::vector<double> u_;
    std::vector<double> gbar_;
    std::vector<double> f_;
    std::vector<double> trial_;
};

void check_degree(int degree) {
    if (degree < 0 || degree > 2) {
        throw std::invalid_argument("local polynomial degree must be 0, 1 or 2, got " + std::to_string(degree));
    }
}

void check_y_grid(std::span<const double> y_grid) {
    if (y_grid.size() < 2) {
        throw std::invalid_argument("y grid needs at least two points");
    }
    const double step = (y_grid.back() - y_grid.front()) / static_cast<double>(y_grid.size() - 1);
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("y grid must be finite and increasing");
    }
    for (std::size_t g = 1; g < y_grid.size(); ++g) {
        if (std::abs((y_grid[g] - y_grid[g - 1]) - step) > 1e-9 * step + 1e-12 * std::abs(y_grid[g])) {
            throw std::invalid_argument("y grid must be equally spaced");
        }
    }
}

void check_conditions(std::span<const double> points) {
    if (points.empty()) {
        throw std::invalid_argument("at least one condition point is required");
    }
    for (double a : points) {
        if (!std::isfinite(a)) {
            throw std::invalid_argument("condition points must be finite");
        }
    }
}

// Fills est.values over the condition x y lattice and applies the link.
void evaluate_lattice(DensityEstimate& est, const Supports& s, int degree, double hx, Link link) {
    const std::size_t cols = est.y_grid.size();
    est.values.assign(est.condition_points.size() * cols, 0.0);
    for (std::size_t l = 0; l < est.condition_points.size(); ++l) {
        const auto cw = condition_weights(s, est.condition_points[l], hx);
        const auto row = resolve_row(cw, s, degree);
        double* out = est.values.data() + l * cols;
        if (row.fallback) {
            est.fallback_count += cols;
        }
        if (link == Link::literal || row.degree == 0) {
            for (std::size_t g = 0; g < cols; ++g) {
                const double theta0 = linear_intercept(row, s, g);
                out[g] = link == Link::literal ? link_positive(theta0) : std::max(theta0, 0.0);
            }
            continue;
        }
        // Degree-0 levels first: cells negligible next to the row peak keep that
        // value, since the exponential fit there is slow and immaterial.
        double mass = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            mass += cw.k[i] * s.count[i];
        }
        double peak = 0.0;
        for (std::size_t g = 0; g < cols; ++g) {
            double acc = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                acc += cw.k[i] * s.g(i, g);
            }
            out[g] = acc / mass;
            peak = std::max(peak, out[g]);
        }
        ExpLinkFit fitter(cw, s);
        Vec3 theta{0.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
        for (std::size_t g = 0; g < cols; ++g) {
            if (out[g] >= kNegligibleLevel * peak) {
                out[g] = fitter.fit(s, g, row.degree + 1, theta);
            }
        }
    }
}

Bandwidths rot_from_binned(const binning::BinnedSample& binned) {
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(binned.total_interior);
    ys.reserve(binned.total_interior);
    for (std::size_t j = 0; j < binned.bins(); ++j) {
        xs.insert(xs.end(), binned.marginal_x[j], binned.midpoints_x[j]);
        ys.insert(ys.end(), binned.marginal_y[j], binned.midpoints_y[j]);
    }
    return {bandwidth_rot(xs), bandwidth_rot(ys)};
}

std::vector<double> default_conditions_binned(const binning::BinnedSample& binned, std::size_t limit) {
    std::vector<double> occupied;
    for (std::size_t j = 0; j < binned.bins(); ++j) {
        if (binned.marginal_x[j] > 0) {
            occupied.push_back(binned.midpoints_x[j]);
        }
    }
    if (occupied.size() <= limit) {
        return occupied;
    }
    std::vector<double> picked(limit);
    const double stride = static_cast<double>(occupied.size() - 1) / static_cast<double>(limit - 1);
    for (std::size_t l = 0; l < limit; ++l) {
        picked[l] = occupied[static_cast<std::size_t>(std::lround(stride * static_cast<double>(l)))];
    }
    return picked;
}

std::vector<double> default_conditions_raw(std::span<const double> xs, std::size_t limit) {
    return stats::linspace(stats::quantile(xs, 0.1), stats::quantile(xs, 0.9), limit);
}

core::LaggedPairs checked_pairs(std::span<const double> values, const CdeConfig& cfg) {
    cfg.validate();
    if (values.size() <= cfg.lag + 10) {
        throw std::invalid_argument("density estimation needs more than lag + 10 = " + std::to_string(cfg.lag + 10) +
                                    " values, got " + std::to_string(values.size()));
    }
    return core::lag_embed(values, cfg.lag);
}

DensityEstimate blank_estimate(const CdeConfig& cfg, std::string method) {
    DensityEstimate est;
    est.degree = cfg.degree;
    est.link = cfg.link;
    est.beta = cfg.beta;
    est.edges = cfg.edges;
    est.beta_mode = cfg.beta_mode;
    est.method = std::move(method);
    return est;
}

void finish(DensityEstimate& est, const CdeConfig& cfg) {
    if (cfg.normalize) {
        normalize_rows(est);
    }
}

}  // namespace

void Bandwidths::validate() const {
    if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
        throw std::invalid_argument("bandwidths must be positive and finite");
    }
}

double gaussian_kernel(double u, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be positive");
    }
    const double z = u / h;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) / h;
}

double bandwidth_rot(std::span<const double> values) {
    if (values.size() < 2) {
        throw std::invalid_argument("bandwidth rule needs at least two values");
    }
    double scale = std::numeric_limits<double>::infinity();
    for (double candidate : {stats::sd(values), stats::iqr(values) / 1.349, stats::mad(values)}) {
        if (candidate > 0.0 && candidate < scale) {
            scale = candidate;
        }
    }
    if (!std::isfinite(scale)) {
        throw NumericalError("zero scale");
    }
    return kRotConstant * scale * std::pow(static_cast<double>(values.size()), -0.2);
}

double link_positive(double theta0) noexcept {
    return std::exp(std::clamp(theta0, -700.0, 700.0));
}

const char* to_string(Link link) noexcept {
    return link == Link::constrained ? "constrained" : "literal";
}

Link link_from_string(const std::string& name) {
    if (name == "constrained") {
        return Link::constrained;
    }
    if (name == "literal") {
        return Link::literal;
    }
    throw std::invalid_argument("unknown link '" + name + "' (expected constrained or literal)");
}

LocalFit local_poly_fit(const binning::BinnedSample& binned, double x, double y, int degree, const Bandwidths& bw) {
    check_degree(degree);
    bw.validate();
    const double grid[1] = {y};
    const auto s = supports_from_binned(binned, grid, bw.hy);
    if (s.size() == 0) {
        throw NumericalError("empty binned sample");
    }
    const auto cw = condition_weights(s, x, bw.hx);
    const auto row = resolve_row(cw, s, degree);
    return {linear_intercept(row, s, 0), row.degree, row.fallback};
}

double local_poly_cde(const binning::BinnedSample& binned, double x, double y, int degree, const Bandwidths& bw) {
    return local_poly_fit(binned, x, y, degree, bw).value;
}

LocalFit constrained_local_poly_fit(const binning::BinnedSample& binned, double x, double y, int degree,
                                    const Bandwidths& bw) {
    check_degree(degree);
    bw.validate();
    const double grid[1] = {y};
    const auto s = supports_from_binned(binned, grid, bw.hy);
    if (s.size() == 0) {
        throw NumericalError("empty binned sample");
    }
    const auto cw = condition_weights(s, x, bw.hx);
    const auto row = resolve_row(cw, s, degree);
    ExpLinkFit fitter(cw, s);
    Vec3 theta{0.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
    return {fitter.fit(s, 0, row.degree + 1, theta), row.degree, row.fallback};
}

void CdeConfig::validate() const {
    if (lag == 0) {
        throw std::invalid_argument("lag must be at least 1");
    }
    static_cast<void>(binning::covered_mass(beta, beta_mode));
    if (edges < 3) {
        throw std::invalid_argument("grid needs at least 3 edges");
    }
    check_degree(degree);
    if (bandwidths) {
        bandwidths->validate();
    }
    depth.validate();
    if (!condition_points.empty()) {
        check_conditions(condition_points);
    }
    if (!y_grid.empty()) {
        check_y_grid(y_grid);
    }
    if (max_conditions == 0) {
        throw std::invalid_argument("max_conditions must be positive");
    }
    if (y_points < 2) {
        throw std::invalid_argument("y_points must be at least 2");
    }
    if (!(grid_width > 0.0) || !std::isfinite(grid_width)) {
        throw std::invalid_argument("grid_width must be positive");
    }
}

double DensityEstimate::grid_step() const noexcept {
    if (y_grid.size() < 2) {
        return 0.0;
    }
    return (y_grid.back() - y_grid.front()) / static_cast<double>(y_grid.size() - 1);
}

std::vector<double> default_y_grid(std::span<const double> values, std::size_t points, double width) {
    const double med = stats::median(values);
    const double scale = stats::mad(values);
    if (!(scale > 0.0)) {
        throw NumericalError("zero MAD");
    }
    return stats::linspace(med - width * scale, med + width * scale, points);
}

void normalize_rows(DensityEstimate& est) {
    const double step = est.grid_step();
    est.empty_rows = 0;
    for (std::size_t l = 0; l < est.rows(); ++l) {
        const double area = stats::trapezoid(est.row(l), step);
        if (!(area > 0.0) || !std::isfinite(area)) {
            ++est.empty_rows;
            continue;
        }
        double* out = est.values.data() + l * est.cols();
        for (std::size_t g = 0; g < est.cols(); ++g) {
            out[g] /= area;
        }
    }
    est.normalized = true;
}

DensityEstimate estimate_from_binned(const binning::BinnedSample& binned, std::span<const double> condition_points,
                                     std::span<const double> y_grid, const CdeConfig& cfg) {
    cfg.validate();
    check_conditions(condition_points);
    check_y_grid(y_grid);
    if (binned.total_interior == 0) {
        throw NumericalError("empty binned sample");
    }
    DensityEstimate est = blank_estimate(cfg, "prop1");
    est.bandwidths = cfg.bandwidths ? *cfg.bandwidths : rot_from_binned(binned);
    est.condition_points.assign(condition_points.begin(), condition_points.end());
    est.y_grid.assign(y_grid.begin(), y_grid.end());
    est.trimmed_count = binned.trimmed_count;
    est.total_interior = binned.total_interior;
    const auto s = supports_from_binned(binned, y_grid, est.bandwidths.hy);
    evaluate_lattice(est, s, cfg.degree, est.bandwidths.hx, cfg.link);
    finish(est, cfg);
    return est;
}

DensityEstimate estimate_pd(std::span<const double> values, const CdeConfig& cfg) {
    const auto pairs = checked_pairs(values, cfg);
    if (!cfg.y_grid.empty()) {
        return estimate_pd(pairs, cfg);
    }
    CdeConfig with_grid = cfg;
    with_grid.y_grid = default_y_grid(values, cfg.y_points, cfg.grid_width);
    return estimate_pd(pairs, with_grid);
}

DensityEstimate estimate_pd(const core::LaggedPairs& pairs, const CdeConfig& cfg) {
    cfg.validate();
    const auto binned = binning::robust_bin(pairs, cfg.depth, cfg.beta, cfg.edges, cfg.beta_mode);
    const auto y_grid =
        cfg.y_grid.empty() ? default_y_grid(pairs.ys(), cfg.y_points, cfg.grid_width) : cfg.y_grid;
    const auto conditions =
        cfg.condition_points.empty() ? default_conditions_binned(binned, cfg.max_conditions) : cfg.condition_points;
    return estimate_from_binned(binned, conditions, y_grid, cfg);
}

DensityEstimate estimate_pd(const core::Window& window, const CdeConfig& cfg) {
    if (window.dim() != 1) {
        throw std::invalid_argument("density estimation needs a one-dimensional window");
    }
    const auto values = window.values();
    return estimate_pd(values, cfg);
}

DensityEstimate estimate_pd_unbinned(std::span<const double> values, const CdeConfig& cfg) {
    const auto pairs = checked_pairs(values, cfg);
    const auto xs = pairs.xs();
    const auto ys = pairs.ys();
    DensityEstimate est = blank_estimate(cfg, "locpol_unbinned");
    est.bandwidths = cfg.bandwidths ? *cfg.bandwidths : Bandwidths{bandwidth_rot(xs), bandwidth_rot(ys)};
    est.y_grid = cfg.y_grid.empty() ? default_y_grid(values, cfg.y_points, cfg.grid_width) : cfg.y_grid;
    est.condition_points =
        cfg.condition_points.empty() ? default_conditions_raw(xs, cfg.max_conditions) : cfg.condition_points;
    est.total_interior = pairs.size();
    const auto s = supports_from_pairs(pairs, est.y_grid, est.bandwidths.hy);
    evaluate_lattice(est, s, cfg.degree, est.bandwidths.hx, cfg.link);
    finish(est, cfg);
    return est;
}

DensityEstimate estimate_pd_kernel(std::span<const double> values, const CdeConfig& cfg) {
    const auto pairs = checked_pairs(values, cfg);
    const auto xs = pairs.xs();
    const auto ys = pairs.ys();
    const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    const double lo = std::min(*xlo, *ylo);
    double hi = std::max(*xhi, *yhi);
    // Nudge the top edge so the largest value stays in an interior bin.
    hi += 1e-9 * std::max(hi - lo, 1.0);
    const auto binned = binning::bin2d(pairs, binning::make_grid(lo, hi, cfg.edges));

    DensityEstimate est = blank_estimate(cfg, "kern_baseline");
    est.degree = 0;
    est.beta = 0.0;
    est.bandwidths = cfg.bandwidths ? *cfg.bandwidths : Bandwidths{bandwidth_rot(xs), bandwidth_rot(ys)};
    est.y_grid = cfg.y_grid.empty() ? default_y_grid(values, cfg.y_points, cfg.grid_width) : cfg.y_grid;
    est.condition_points =
        cfg.condition_points.empty() ? default_conditions_raw(xs, cfg.max_conditions) : cfg.condition_points;
    est.trimmed_count = binned.trimmed_count;
    est.total_interior = binned.total_interior;
    const auto s = supports_from_binned(binned, est.y_grid, est.bandwidths.hy);
    evaluate_lattice(est, s, 0, est.bandwidths.hx, Link::constrained);
    finish(est, cfg);
    return est;
}

const char* to_string(Estimator e) noexcept {
    switch (e) {
        case Estimator::prop1:
            return "prop1";
        case Estimator::locpol_unbinned:
            return "locpol_unbinned";
        case Estimator::kern_baseline:
            return "kern_baseline";
    }
    return "unknown";
}

Estimator estimator_from_string(const std::string& name) {
    for (auto e : {Estimator::prop1, Estimator::locpol_unbinned, Estimator::kern_baseline}) {
        if (name == to_string(e)) {
            return e;
        }
    }
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (expected prop1, locpol_unbinned or kern_baseline)");
}

DensityEstimate estimate(Estimator e, std::span<const double> values, const CdeConfig& cfg) {
    switch (e) {
        case Estimator::prop1:
            return estimate_pd(values, cfg);
        case Estimator::locpol_unbinned:
            return estimate_pd_unbinned(values, cfg);
        case Estimator::kern_baseline:
            return estimate_pd_kernel(values, cfg);
    }
    throw std::invalid_argument("unknown estimator");
}

CdfEstimate conditional_cdf_nw(std::span<const std::array<double, 2>> sample, double x, std::span<const double> y_grid,
                               double h) {
    if (sample.empty()) {
        throw std::invalid_argument("conditional CDF needs a nonempty sample");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be positive");
    }
    if (!std::is_sorted(y_grid.begin(), y_grid.end())) {
        throw std::invalid_argument("y grid must be nondecreasing");
    }
    std::vector<std::pair<double, double>> weighted;  // (Y, weight)
    weighted.reserve(sample.size());
    for (const auto& p : sample) {
        const double w = gaussian_kernel(p[0] - x, h);
        if (w > 0.0) {
            weighted.emplace_back(p[1], w);
        }
    }
    if (weighted.empty()) {
        throw NumericalError("condition point outside data support");
    }
    std::sort(weighted.begin(), weighted.end());
    // Cumulative sums in one fixed order keep the result monotone and capped by the total.
    std::vector<double> cumulative(weighted.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        acc += weighted[i].second;
        cumulative[i] = acc;
    }
    const double total = cumulative.back();
    CdfEstimate out;
    out.x = x;
    out.y_grid.assign(y_grid.begin(), y_grid.end());
    out.values.resize(y_grid.size());
    for (std::size_t g = 0; g < y_grid.size(); ++g) {
        const auto it = std::upper_bound(weighted.begin(), weighted.end(), y_grid[g],
                                         [](double y, const auto& pw) { return y < pw.first; });
        const auto taken = static_cast<std::size_t>(it - weighted.begin());
        out.values[g] = taken == 0 ? 0.0 : cumulative[taken - 1] / total;
    }
    return out;
}

nlohmann::json density_metadata(const DensityEstimate& est) {
    return {
        {"method", est.method},
        {"degree", est.degree},
        {"link", to_string(est.link)},
        {"hx", est.bandwidths.hx},
        {"hy", est.bandwidths.hy},
        {"beta", est.beta},
        {"beta_mode", binning::to_string(est.beta_mode)},
        {"m", est.edges},
        {"normalized", est.normalized},
        {"fallback_count", est.fallback_count},
        {"empty_rows", est.empty_rows},
        {"trimmed_count", est.trimmed_count},
        {"total_interior", est.total_interior},
        {"conditions", est.rows()},
        {"grid_points", est.cols()},
    };
}

void write_density_csv(std::ostream& out, const DensityEstimate& est) {
    out << "# " << density_metadata(est).dump() << '\n';
    out << "condition";
    for (double y : est.y_grid) {
        out << ',' << core::format_double(y);
    }
    out << '\n';
    for (std::size_t l = 0; l < est.rows(); ++l) {
        out << core::format_double(est.condition_points[l]);
        for (double v : est.row(l)) {
            out << ',' << core::format_double(v);
        }
        out << '\n';
    }
}

}  // namespace depthmon::cde
