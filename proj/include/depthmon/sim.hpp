#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "depthmon/cde.hpp"
#include "depthmon/random.hpp"

// Regime-switching stream generators, contamination, reference densities and
// the evaluation measures used to compare estimators.
namespace depthmon::sim {

enum class InnovationFamily { normal, student_t, ged, degenerate };

[[nodiscard]] const char* to_string(InnovationFamily family) noexcept;
[[nodiscard]] InnovationFamily innovation_family_from_string(const std::string& name);

/// Law of the innovations Z_t, optionally skewed (Fernandez-Steel, skew = xi).
///
/// With `standardized` the law is shifted and scaled to mean 0 and variance 1
/// after skewing; otherwise the raw (skewed) base law is used. The degenerate
/// family is Z = 0.
struct InnovationSpec {
    InnovationFamily family = InnovationFamily::normal;
    double shape = 4.0;  ///< degrees of freedom (student_t) or shape (ged)
    double skew = 1.0;
    bool standardized = true;

    void validate() const;
    [[nodiscard]] double pdf(double z) const;
    [[nodiscard]] double draw(Rng& rng) const;
};

/// Default skew used when a skewed law is requested without a value.
inline constexpr double kDefaultSkew = 1.5;

/// X_t = c + phi X_{t-1} + sigma_t Z_t with
/// sigma_t^2 = omega + beta sigma_{t-1}^2 + alpha X_{t-1}^2, or with the
/// previous residual in place of X_{t-1} when `garch_on_residuals` is set.
struct ArGarchSpec {
    double c = 5.0;
    double phi = 0.1;
    double omega = 1.0;
    double alpha = 0.75;
    double beta = 0.1;
    bool garch_on_residuals = false;
    InnovationSpec innovation;

    void validate() const;
    [[nodiscard]] bool explosive() const noexcept { return alpha + beta >= 1.0; }
    [[nodiscard]] double unconditional_mean() const;
};

/// sigma_t^2 from sigma_{t-1}^2 and the previous shock (X_{t-1} or residual).
[[nodiscard]] double garch_variance_step(const ArGarchSpec& spec, double previous_variance, double previous_shock);

/// Self-exciting threshold AR: regime j is active when
/// thresholds[j-1] < X_{t-delay} <= thresholds[j]; then
/// X_t = b_0j + sum_i b_ij X_{t-i} + scale * Z_t.
struct SetarSpec {
    std::vector<std::vector<double>> coefficients;  ///< one row (b_0, b_1, ..., b_p) per regime
    std::vector<double> thresholds;                 ///< ascending, one fewer than regimes
    std::size_t delay = 1;
    double scale = 1.0;
    InnovationSpec innovation;

    void validate() const;
    [[nodiscard]] std::size_t order() const noexcept;
    /// 0-based regime for a delay-variable value.
    [[nodiscard]] std::size_t regime(double delay_value) const noexcept;
    /// Linear predictor of X_t; history holds X_{t-1}, X_{t-2}, ... (most recent first).
    [[nodiscard]] double predictor(std::span<const double> history) const;
};

using SubModel = std::variant<ArGarchSpec, SetarSpec>;

/// Hidden Markov switching between sub-models that share the stream history.
struct CharmeSpec {
    std::vector<SubModel> models;
    std::vector<std::vector<double>> transition;  ///< rows sum to 1
    std::size_t initial_label = 1;                ///< 1-based

    void validate() const;
    /// Stationary distribution of the transition matrix.
    [[nodiscard]] std::vector<double> stationary() const;
};

[[nodiscard]] CharmeSpec single_model(SubModel model);

/// Two-state transition matrix with stationary law (share, 1 - share) that
/// leaves the current state with probability at most `rate`.
[[nodiscard]] std::vector<std::vector<double>> two_state_transition(double share, double rate);

inline constexpr std::size_t kDefaultBurnIn = 1000;

struct Trajectory {
    std::vector<double> values;
    std::vector<std::size_t> labels;   ///< 1-based regime of each value
    std::vector<bool> contaminated;
    std::vector<double> location;      ///< conditional mean of the clean value given the past
    std::vector<double> scale;         ///< conditional scale of the clean value given the past
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Throws std::invalid_argument on an invalid spec (e.g. a transition row not summing to 1).
[[nodiscard]] Trajectory simulate_charme(const CharmeSpec& spec, std::size_t n, std::size_t burn_in,
                                         std::uint64_t seed);

/// CHARME with the hidden chain replaced by a fixed 1-based label sequence;
/// the burn-in runs under the first label.
[[nodiscard]] Trajectory simulate_schedule(const CharmeSpec& spec, std::span<const std::size_t> labels,
                                           std::size_t burn_in, std::uint64_t seed);

/// Labels `from` before index t_star and `to` from t_star on.
[[nodiscard]] std::vector<std::size_t> switch_schedule(std::size_t n, std::size_t t_star, std::size_t from,
                                                       std::size_t to);

[[nodiscard]] Trajectory simulate_ar_garch(const ArGarchSpec& spec, std::size_t n, std::size_t burn_in,
                                           std::uint64_t seed);
[[nodiscard]] Trajectory simulate_setar(const SetarSpec& spec, std::size_t n, std::size_t burn_in,
                                        std::uint64_t seed);

enum class ContaminationKind {
    additive,    ///< Y = X + theta with theta ~ N(location, scale^2)
    innovative,  ///< Y = theta drawn from a mixture fitted to the clean values
};

[[nodiscard]] const char* to_string(ContaminationKind kind) noexcept;
[[nodiscard]] ContaminationKind contamination_kind_from_string(const std::string& name);

struct ContaminationSpec {
    double fraction = 0.0;
    ContaminationKind kind = ContaminationKind::additive;
    double location = 0.0;
    double scale = 1.0;

    void validate() const;
};

/// Seven-component replacement mixture: N(q_j, (MAD/2)^2) at the 20, 30, 40,
/// 60, 70 and 80% quantiles plus N(median, (10 SD)^2), equal weights.
struct OutlierMixture {
    std::vector<double> means;
    std::vector<double> sds;

    [[nodiscard]] double draw(Rng& rng) const;
};

[[nodiscard]] OutlierMixture outlier_mixture(std::span<const double> clean);

/// Flags each index independently with probability `fraction` and perturbs the flagged values.
[[nodiscard]] Trajectory contaminate(const Trajectory& traj, const ContaminationSpec& spec, std::uint64_t seed);

/// Density of X_t given X_{t-1} = a for a SETAR model, with every lag set to a.
[[nodiscard]] std::vector<double> true_conditional_density(const SetarSpec& spec, double a,
                                                           std::span<const double> y_grid);

/// Density of X_t given X_{t-1} = a and the current volatility sigma_t.
[[nodiscard]] std::vector<double> true_conditional_density(const ArGarchSpec& spec, double a, double sigma,
                                                           std::span<const double> y_grid);

/// Only single-model specs have a closed form; throws std::invalid_argument otherwise.
[[nodiscard]] std::vector<double> true_conditional_density(const CharmeSpec& spec, double a,
                                                           std::span<const double> y_grid);

struct TruthConfig {
    std::size_t length = 200000;   ///< simulated transitions
    std::size_t neighbours = 2000; ///< states nearest to the condition that enter the average
    std::size_t burn_in = kDefaultBurnIn;
};

/// Conditional density of X_t given X_{t-1} = a for one sub-model, averaging the
/// exact one-step densities over simulated states whose previous value is close
/// to a (Gaussian weights with bandwidth equal to the neighbour radius / 2).
[[nodiscard]] cde::DensityEstimate truth_density(const SubModel& model, std::span<const double> condition_points,
                                                 std::span<const double> y_grid, const TruthConfig& cfg,
                                                 std::uint64_t seed);

struct EvalGrid {
    std::vector<double> y_grid;
    std::vector<double> condition_points;
};

/// y grid over median +- width * MAD; condition points equally spaced over
/// the 10% to 90% quantile range. Throws NumericalError("zero MAD").
[[nodiscard]] EvalGrid eval_grid(std::span<const double> values, double width = 5.0, std::size_t points = 500,
                                 std::size_t conditions = 20);

/// Sum over steps of the median over condition points of abs_dev(estimate, truth).
[[nodiscard]] double eval_r1(std::span<const cde::DensityEstimate> estimates,
                             std::span<const cde::DensityEstimate> truths);

/// Sum over steps of the median over condition points of abs_dev(estimate row, target).
[[nodiscard]] double eval_r2(std::span<const cde::DensityEstimate> estimates,
                             std::span<const std::vector<double>> targets);

/// CSV with columns index,value,regime,contaminated.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace depthmon::sim
