#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthmon/binning.hpp"
#include "depthmon/depth.hpp"
#include "depthmon/window.hpp"

// Conditional (predictive) density estimation of X_t given X_{t-k}.
//
// The estimator is a local polynomial fit of kernel-smoothed responses
// K_hy(Y - y) on powers of (X - x), weighted by K_hx(X - x) and the bin
// counts of the robustly binned lagged pairs; its intercept estimates g(y|x).
namespace depthmon::cde {

struct Bandwidths {
    double hx = 0.0;  ///< smoothing across the condition axis
    double hy = 0.0;  ///< smoothing along the response axis

    void validate() const;
};

/// Gaussian kernel scaled by h: phi(u / h) / h. Throws for h <= 0.
[[nodiscard]] double gaussian_kernel(double u, double h);

/// Robust rule of thumb 0.9 * min(sd, IQR/1.349, MAD) * n^(-1/5), taking only
/// the positive scale candidates. Throws NumericalError("zero scale") when all vanish.
[[nodiscard]] double bandwidth_rot(std::span<const double> values);

inline constexpr double kRotConstant = 0.9;

/// exp(theta0) with the exponent clamped to [-700, 700].
[[nodiscard]] double link_positive(double theta0) noexcept;

/// How the estimate is kept nonnegative.
enum class Link {
    constrained,  ///< fit exp(polynomial) by weighted nonlinear least squares, report exp(theta0)
    literal,      ///< exp applied to the intercept of the unconstrained linear fit
};

[[nodiscard]] const char* to_string(Link link) noexcept;
[[nodiscard]] Link link_from_string(const std::string& name);

struct LocalFit {
    double value = 0.0;          ///< fitted intercept (or its image under the link)
    std::size_t degree_used = 0; ///< degree actually fitted
    bool fallback = false;       ///< true when a singular design forced degree 0
};

/// Unconstrained local polynomial fit of degree r in {0, 1, 2} at (x, y) on binned data.
[[nodiscard]] LocalFit local_poly_fit(const binning::BinnedSample& binned, double x, double y, int degree,
                                      const Bandwidths& bw);

/// Intercept of local_poly_fit.
[[nodiscard]] double local_poly_cde(const binning::BinnedSample& binned, double x, double y, int degree,
                                    const Bandwidths& bw);

/// Constrained fit: exp(polynomial) fitted by weighted least squares; returns exp(theta0).
[[nodiscard]] LocalFit constrained_local_poly_fit(const binning::BinnedSample& binned, double x, double y,
                                                  int degree, const Bandwidths& bw);

struct CdeConfig {
    std::size_t lag = 1;
    double beta = 0.05;
    std::size_t edges = binning::kDefaultEdges;
    binning::BetaMode beta_mode = binning::BetaMode::trim_mass;
    int degree = 1;
    std::optional<Bandwidths> bandwidths;  ///< rule of thumb on each axis when empty
    bool normalize = true;
    Link link = Link::constrained;
    depth::DepthParams depth;
    std::vector<double> condition_points;  ///< derived from the data when empty
    std::vector<double> y_grid;            ///< derived from the data when empty
    std::size_t max_conditions = 20;
    std::size_t y_points = 500;
    double grid_width = 5.0;  ///< y grid spans median +- grid_width * MAD

    void validate() const;
};

struct DensityEstimate {
    std::vector<double> condition_points;
    std::vector<double> y_grid;
    std::vector<double> values;  ///< condition-major: values[l * y_grid.size() + g]
    bool normalized = false;

    // Provenance of the estimate.
    int degree = 0;
    Link link = Link::constrained;
    Bandwidths bandwidths;
    double beta = 0.0;
    std::size_t edges = 0;
    binning::BetaMode beta_mode = binning::BetaMode::trim_mass;
    std::string method;
    std::size_t fallback_count = 0;  ///< lattice points that fell back to degree 0
    std::size_t empty_rows = 0;      ///< rows that were identically zero and left unnormalized
    std::size_t trimmed_count = 0;
    std::size_t total_interior = 0;

    [[nodiscard]] std::size_t rows() const noexcept { return condition_points.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return y_grid.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t l) const noexcept {
        return {values.data() + l * cols(), cols()};
    }
    [[nodiscard]] double grid_step() const noexcept;
};

/// Full pipeline: lag embedding, robust depth binning, bandwidths, local
/// polynomial fits on the condition x y-grid lattice, link, and optional
/// per-row renormalization. Requires more than lag + 10 values.
[[nodiscard]] DensityEstimate estimate_pd(std::span<const double> values, const CdeConfig& cfg);
[[nodiscard]] DensityEstimate estimate_pd(const core::Window& window, const CdeConfig& cfg);

/// Same pipeline on lagged pairs given directly; without a configured y grid
/// the default grid is built from the responses.
[[nodiscard]] DensityEstimate estimate_pd(const core::LaggedPairs& pairs, const CdeConfig& cfg);

/// Lattice evaluation on an already binned sample.
[[nodiscard]] DensityEstimate estimate_from_binned(const binning::BinnedSample& binned,
                                                   std::span<const double> condition_points,
                                                   std::span<const double> y_grid, const CdeConfig& cfg);

/// Same estimator on the raw lagged pairs, without binning or trimming.
[[nodiscard]] DensityEstimate estimate_pd_unbinned(std::span<const double> values, const CdeConfig& cfg);

/// Degree-0 kernel estimator on a plain (non-depth, untrimmed) grid binning.
[[nodiscard]] DensityEstimate estimate_pd_kernel(std::span<const double> values, const CdeConfig& cfg);

enum class Estimator { prop1, locpol_unbinned, kern_baseline };

[[nodiscard]] const char* to_string(Estimator e) noexcept;
[[nodiscard]] Estimator estimator_from_string(const std::string& name);
[[nodiscard]] DensityEstimate estimate(Estimator e, std::span<const double> values, const CdeConfig& cfg);

/// Default evaluation grid: y_points values over median +- grid_width * MAD.
[[nodiscard]] std::vector<double> default_y_grid(std::span<const double> values, std::size_t points, double width);

/// Divides every row by its trapezoid integral; rows integrating to zero are left as is.
void normalize_rows(DensityEstimate& est);

struct CdfEstimate {
    double x = 0.0;
    std::vector<double> y_grid;
    std::vector<double> values;  ///< nondecreasing, within [0, 1]
};

/// Nadaraya-Watson estimate of P(Y <= y | X = x) with Gaussian weights.
/// Throws NumericalError when every weight underflows.
[[nodiscard]] CdfEstimate conditional_cdf_nw(std::span<const std::array<double, 2>> sample, double x,
                                             std::span<const double> y_grid, double h);

[[nodiscard]] nlohmann::json density_metadata(const DensityEstimate& est);

/// `# {metadata}` line, then a header `condition,<y_1>,...` and one row per condition point.
void write_density_csv(std::ostream& out, const DensityEstimate& est);

}  // namespace depthmon::cde
