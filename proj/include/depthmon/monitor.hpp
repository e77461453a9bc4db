#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthmon/cde.hpp"
#include "depthmon/distance.hpp"
#include "depthmon/sample.hpp"
#include "depthmon/window.hpp"

// Sequential monitoring of a stream against reference regimes.
//
// Proposal 1 estimates the predictive density of each window and assigns the
// window to the nearest reference density (psi); an alert is raised when the
// monitored distance exceeds a block-bootstrap threshold. Proposal 2 compares
// each window with a fixed reference sample through the depth-rank Wilcoxon
// statistic.
namespace depthmon::monitor {

enum class AlertMode {
    current_regime,  ///< alert when the distance to the declared regime exceeds its threshold
    min_distance,    ///< alert when the smallest distance exceeds the threshold of its reference
};

[[nodiscard]] const char* to_string(AlertMode mode) noexcept;
[[nodiscard]] AlertMode alert_mode_from_string(const std::string& name);

struct MonitorConfig {
    std::size_t window = 500;
    std::size_t stride = 1;
    cde::CdeConfig cde;
    DistanceKind distance = DistanceKind::hellinger;
    bool allow_abs_dev = false;  ///< abs_dev is an evaluation measure; monitoring with it needs this flag
    double level = 0.05;
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    AlertMode alert_mode = AlertMode::current_regime;
    std::size_t declared_regime = 0;  ///< 0-based reference index assumed at the start
    bool adopt_on_alert = true;       ///< after an alert, declare the nearest reference as current
    bool resample_reference = true;   ///< bootstrap the reference density too, not only the window
    std::size_t reference_length = 100;   ///< Proposal 2: leading observations forming the reference
    std::size_t calibration_length = 0;   ///< Proposal 2: leading observations resampled for the threshold; 0 = reference_length + window
    std::size_t rank_lag = 0;             ///< Proposal 2: 0 ranks raw observations, k ranks lag-k pairs

    void validate() const;
};

/// Reference regimes: source samples, their cached densities on a common
/// lattice, and one bootstrap threshold per reference.
struct ReferenceSet {
    std::vector<std::vector<double>> samples;
    std::vector<cde::DensityEstimate> densities;
    std::vector<double> thresholds;

    [[nodiscard]] std::size_t size() const noexcept { return densities.size(); }
    [[nodiscard]] const std::vector<double>& y_grid() const { return densities.at(0).y_grid; }
    [[nodiscard]] const std::vector<double>& condition_points() const { return densities.at(0).condition_points; }
};

/// Densifies reference samples with one lattice: the configured condition
/// points / y grid, or ones derived from the pooled samples.
[[nodiscard]] ReferenceSet build_references(std::vector<std::vector<double>> samples, const cde::CdeConfig& cfg);

/// Reference set from precomputed, mutually aligned densities (no samples, no thresholds).
[[nodiscard]] ReferenceSet references_from_densities(std::vector<cde::DensityEstimate> densities);

/// `cfg` with the lattice of `refs` pinned so every window is estimated on it.
[[nodiscard]] cde::CdeConfig pinned_config(const ReferenceSet& refs, cde::CdeConfig cfg);

struct Classification {
    std::size_t psi = 0;
    std::vector<double> distances;
};

/// Nearest reference (lowest index on ties). Throws std::invalid_argument on grid misalignment.
[[nodiscard]] Classification classify(const cde::DensityEstimate& est, const ReferenceSet& refs, DistanceKind kind);

/// (1 - level) quantile of bootstrap distances. Each replicate estimates a
/// window from a circular block bootstrap resample of the reference's lag
/// pairs (window - lag pairs, block length ceil(window^(1/3))) and compares it
/// with a full-length resample of the reference, or with `reference_density`
/// itself when cfg.resample_reference is false. Deterministic in `seed`.
[[nodiscard]] double bootstrap_pd_critical(std::span<const double> reference,
                                           const cde::DensityEstimate& reference_density, const MonitorConfig& cfg,
                                           std::uint64_t seed);

/// Fills refs.thresholds by bootstrapping every reference sample.
void calibrate(ReferenceSet& refs, const MonitorConfig& cfg);

struct MonitorReport {
    std::size_t end_index = 0;
    std::optional<double> time;
    std::vector<double> distances;  ///< Proposal 1: one per reference
    std::optional<double> zscore;   ///< Proposal 2
    std::size_t psi = 0;
    double statistic = 0.0;         ///< monitored quantity compared with the threshold
    double threshold = 0.0;
    bool alert = false;
    double elapsed = 0.0;           ///< seconds spent on this step
};

/// Proposal 1 state: cached references, thresholds and the declared regime.
class PdMonitor {
public:
    /// Calibrates missing thresholds from the reference samples.
    PdMonitor(ReferenceSet refs, MonitorConfig cfg);

    [[nodiscard]] MonitorReport step(const core::Window& window);

    /// Rebuilds reference densities and thresholds from new samples.
    void refresh_references(std::vector<std::vector<double>> samples);

    [[nodiscard]] const ReferenceSet& references() const noexcept { return refs_; }
    [[nodiscard]] const MonitorConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t declared_regime() const noexcept { return declared_; }

private:
    ReferenceSet refs_;
    MonitorConfig cfg_;
    cde::CdeConfig pinned_;
    std::size_t declared_ = 0;
};

[[nodiscard]] MonitorReport monitor_pd_step(const core::Window& window, PdMonitor& state);

/// Proposal 2 state: fixed reference sample and bootstrap critical value for |z|.
class WilcoxonMonitor {
public:
    /// `calibration_pool` must hold at least window + reference.size() points.
    WilcoxonMonitor(Sample reference, const Sample& calibration_pool, MonitorConfig cfg);

    [[nodiscard]] MonitorReport step(const core::Window& window) const;

    [[nodiscard]] double threshold() const noexcept { return threshold_; }
    [[nodiscard]] const Sample& reference() const noexcept { return reference_; }

private:
    Sample reference_;
    MonitorConfig cfg_;
    double threshold_ = 0.0;
};

[[nodiscard]] MonitorReport monitor_wilcoxon_step(const core::Window& window, const WilcoxonMonitor& state);

/// Points ranked by Proposal 2 for a window: the observations themselves, or lag pairs of a 1-D window.
[[nodiscard]] Sample rank_points(const core::Window& window, std::size_t lag);
[[nodiscard]] Sample rank_points(std::span<const double> values, std::size_t lag);

struct MonitorRun {
    std::vector<MonitorReport> reports;
    std::vector<std::string> warnings;
    std::size_t alerts = 0;
    std::size_t misclassified = 0;  ///< reports whose psi + 1 differs from the true label at end_index
    bool labelled = false;
};

using StepFunction = std::function<MonitorReport(const core::Window&)>;

/// Slides a window of `window` observations over the stream and calls `step`
/// every `stride` arrivals once the window is full. Stride 1 over T
/// observations yields max(0, T - window + 1) reports. `labels`, when given,
/// are 1-based true regimes aligned with the stream.
[[nodiscard]] MonitorRun run_monitor(std::span<const core::Observation> stream, std::size_t window,
                                     std::size_t stride, const StepFunction& step,
                                     std::span<const std::size_t> labels = {});

[[nodiscard]] nlohmann::json report_json(const MonitorReport& report, bool include_elapsed = false);

/// One JSON object per line.
void write_reports_jsonl(std::ostream& out, std::span<const MonitorReport> reports, bool include_elapsed = false);

/// end_index,psi,statistic,threshold,alert followed by zscore (Proposal 2) or d_0..d_{M-1} (Proposal 1,
/// indexed like psi).
void write_reports_csv(std::ostream& out, std::span<const MonitorReport> reports);

}  // namespace depthmon::monitor
