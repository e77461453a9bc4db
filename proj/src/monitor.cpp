#include "depthmon/monitor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "depthmon/csv.hpp"
#include "depthmon/random.hpp"
#include "depthmon/rank.hpp"
#include "depthmon/stats.hpp"

namespace depthmon::monitor {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void stamp(MonitorReport& report, const core::Window& window) {
    report.end_index = window.end_index();
    report.time = window[window.size() - 1].time;
}

}  // namespace

const char* to_string(AlertMode mode) noexcept {
    return mode == AlertMode::current_regime ? "current_regime" : "min_distance";
}

AlertMode alert_mode_from_string(const std::string& name) {
    if (name == "current_regime") {
        return AlertMode::current_regime;
    }
    if (name == "min_distance") {
        return AlertMode::min_distance;
    }
    throw std::invalid_argument("unknown alert_mode '" + name + "' (expected current_regime or min_distance)");
}

void MonitorConfig::validate() const {
    if (window < 50) {
        throw std::invalid_argument("monitor window must hold at least 50 observations, got " +
                                    std::to_string(window));
    }
    if (stride == 0) {
        throw std::invalid_argument("monitor stride must be positive");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("alert level must lie in (0, 1)");
    }
    if (replicates < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 replicates, got " + std::to_string(replicates));
    }
    if (distance == DistanceKind::abs_dev && !allow_abs_dev) {
        throw std::invalid_argument("abs_dev is an evaluation measure; set allow_abs_dev to monitor with it");
    }
    if (reference_length == 0) {
        throw std::invalid_argument("reference_length must be positive");
    }
    cde.validate();
}

ReferenceSet build_references(std::vector<std::vector<double>> samples, const cde::CdeConfig& cfg) {
    if (samples.empty()) {
        throw std::invalid_argument("at least one reference sample is required");
    }
    cde::CdeConfig pinned = cfg;
    std::vector<double> pooled;
    for (const auto& s : samples) {
        pooled.insert(pooled.end(), s.begin(), s.end());
    }
    if (pinned.y_grid.empty()) {
        pinned.y_grid = cde::default_y_grid(pooled, cfg.y_points, cfg.grid_width);
    }
    if (pinned.condition_points.empty()) {
        pinned.condition_points =
            stats::linspace(stats::quantile(pooled, 0.1), stats::quantile(pooled, 0.9), cfg.max_conditions);
    }
    ReferenceSet refs;
    refs.densities.reserve(samples.size());
    for (const auto& s : samples) {
        refs.densities.push_back(cde::estimate_pd(s, pinned));
    }
    refs.samples = std::move(samples);
    return refs;
}

ReferenceSet references_from_densities(std::vector<cde::DensityEstimate> densities) {
    if (densities.empty()) {
        throw std::invalid_argument("at least one reference density is required");
    }
    for (std::size_t k = 1; k < densities.size(); ++k) {
        require_aligned(densities[0], densities[k]);
    }
    ReferenceSet refs;
    refs.densities = std::move(densities);
    return refs;
}

cde::CdeConfig pinned_config(const ReferenceSet& refs, cde::CdeConfig cfg) {
    cfg.y_grid = refs.y_grid();
    cfg.condition_points = refs.condition_points();
    return cfg;
}

Classification classify(const cde::DensityEstimate& est, const ReferenceSet& refs, DistanceKind kind) {
    if (refs.size() == 0) {
        throw std::invalid_argument("classification needs at least one reference");
    }
    Classification out;
    out.distances.reserve(refs.size());
    for (std::size_t k = 0; k < refs.size(); ++k) {
        out.distances.push_back(distance(kind, est, refs.densities[k]));
        if (out.distances[k] < out.distances[out.psi]) {
            out.psi = k;
        }
    }
    return out;
}

double bootstrap_pd_critical(std::span<const double> reference, const cde::DensityEstimate& reference_density,
                             const MonitorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = cfg.window;
    if (reference.size() < n) {
        throw std::invalid_argument("reference of length " + std::to_string(reference.size()) +
                                    " is shorter than the window (" + std::to_string(n) + ")");
    }
    cde::CdeConfig pinned = cfg.cde;
    pinned.y_grid = reference_density.y_grid;
    pinned.condition_points = reference_density.condition_points;
    // Blocks are drawn from the lagged pairs, so that no pair straddles two blocks.
    const auto source = core::lag_embed(reference, pinned.lag);
    const auto resample = [&](std::size_t length, Rng& rng) {
        const auto block = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(length)) - 1e-9));
        core::LaggedPairs out;
        out.lag = pinned.lag;
        out.pairs.resize(length - pinned.lag);
        std::uniform_int_distribution<std::size_t> start(0, source.size() - 1);
        for (std::size_t filled = 0; filled < out.pairs.size();) {
            const std::size_t s = start(rng);
            for (std::size_t j = 0; j < block && filled < out.pairs.size(); ++j) {
                out.pairs[filled++] = source.pairs[(s + j) % source.size()];
            }
        }
        return out;
    };
    std::vector<double> distances(cfg.replicates);
    for (std::size_t b = 0; b < cfg.replicates; ++b) {
        Rng rng = make_substream(seed, b);
        const auto est = cde::estimate_pd(resample(n, rng), pinned);
        if (cfg.resample_reference) {
            const auto ref_est = cde::estimate_pd(resample(reference.size(), rng), pinned);
            distances[b] = distance(cfg.distance, est, ref_est);
        } else {
            distances[b] = distance(cfg.distance, est, reference_density);
        }
    }
    return stats::quantile(distances, 1.0 - cfg.level);
}

void calibrate(ReferenceSet& refs, const MonitorConfig& cfg) {
    if (refs.samples.size() != refs.size()) {
        throw std::invalid_argument("thresholds need the reference samples");
    }
    refs.thresholds.resize(refs.size());
    for (std::size_t k = 0; k < refs.size(); ++k) {
        refs.thresholds[k] = bootstrap_pd_critical(refs.samples[k], refs.densities[k], cfg, cfg.seed + k);
    }
}

PdMonitor::PdMonitor(ReferenceSet refs, MonitorConfig cfg) : refs_(std::move(refs)), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (refs_.size() == 0) {
        throw std::invalid_argument("monitoring needs at least one reference");
    }
    if (cfg_.declared_regime >= refs_.size()) {
        throw std::invalid_argument("declared regime " + std::to_string(cfg_.declared_regime) +
                                    " is not a reference index");
    }
    if (refs_.thresholds.size() != refs_.size()) {
        calibrate(refs_, cfg_);
    }
    pinned_ = pinned_config(refs_, cfg_.cde);
    declared_ = cfg_.declared_regime;
}

MonitorReport PdMonitor::step(const core::Window& window) {
    const auto start = std::chrono::steady_clock::now();
    if (!window.full()) {
        throw std::invalid_argument("monitoring step needs a full window");
    }
    MonitorReport report;
    stamp(report, window);
    const auto est = cde::estimate_pd(window, pinned_);
    auto cls = classify(est, refs_, cfg_.distance);
    report.psi = cls.psi;
    if (cfg_.alert_mode == AlertMode::current_regime) {
        report.statistic = cls.distances[declared_];
        report.threshold = refs_.thresholds[declared_];
    } else {
        report.statistic = cls.distances[cls.psi];
        report.threshold = refs_.thresholds[cls.psi];
    }
    report.alert = report.statistic > report.threshold;
    if (report.alert && cfg_.adopt_on_alert) {
        declared_ = cls.psi;
    }
    report.distances = std::move(cls.distances);
    report.elapsed = seconds_since(start);
    return report;
}

void PdMonitor::refresh_references(std::vector<std::vector<double>> samples) {
    refs_ = build_references(std::move(samples), pinned_);
    calibrate(refs_, cfg_);
    if (declared_ >= refs_.size()) {
        declared_ = 0;
    }
}

MonitorReport monitor_pd_step(const core::Window& window, PdMonitor& state) { return state.step(window); }

Sample rank_points(std::span<const double> values, std::size_t lag) {
    if (lag == 0) {
        return Sample::from_values(values);
    }
    return core::lag_embed(values, lag).as_sample();
}

Sample rank_points(const core::Window& window, std::size_t lag) {
    if (lag == 0) {
        return window.sample();
    }
    if (window.dim() != 1) {
        throw std::invalid_argument("lag pairs need a one-dimensional window");
    }
    const auto values = window.values();
    return rank_points(values, lag);
}

WilcoxonMonitor::WilcoxonMonitor(Sample reference, const Sample& calibration_pool, MonitorConfig cfg)
    : reference_(std::move(reference)), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (reference_.empty()) {
        throw std::invalid_argument("Wilcoxon monitoring needs a nonempty reference");
    }
    const std::size_t m = cfg_.rank_lag == 0 ? cfg_.window : cfg_.window - cfg_.rank_lag;
    threshold_ = rank::bootstrap_rank_critical(calibration_pool, m, reference_.size(), cfg_.level, cfg_.replicates,
                                               cfg_.seed, cfg_.cde.depth);
}

MonitorReport WilcoxonMonitor::step(const core::Window& window) const {
    const auto start = std::chrono::steady_clock::now();
    if (!window.full()) {
        throw std::invalid_argument("monitoring step needs a full window");
    }
    MonitorReport report;
    stamp(report, window);
    const auto points = rank_points(window, cfg_.rank_lag);
    const auto result = rank::wilcoxon_statistic(points, reference_, cfg_.cde.depth);
    report.zscore = result.zscore;
    report.statistic = std::abs(result.zscore);
    report.threshold = threshold_;
    report.alert = report.statistic > threshold_;
    report.psi = report.alert ? 1 : 0;
    report.elapsed = seconds_since(start);
    return report;
}

MonitorReport monitor_wilcoxon_step(const core::Window& window, const WilcoxonMonitor& state) {
    return state.step(window);
}

MonitorRun run_monitor(std::span<const core::Observation> stream, std::size_t window, std::size_t stride,
                       const StepFunction& step, std::span<const std::size_t> labels) {
    if (window == 0 || stride == 0) {
        throw std::invalid_argument("window and stride must be positive");
    }
    if (!labels.empty() && labels.size() != stream.size()) {
        throw std::invalid_argument("labels must align with the stream");
    }
    MonitorRun run;
    run.labelled = !labels.empty();
    if (stream.size() < window) {
        run.warnings.push_back("stream of " + std::to_string(stream.size()) +
                               " observations is shorter than the window (" + std::to_string(window) +
                               "); no reports");
        return run;
    }
    core::Window current(window);
    std::size_t since_full = 0;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        try {
            current.push(stream[t]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("stream position " + std::to_string(t) + ": " + e.what());
        }
        if (!current.full()) {
            continue;
        }
        if (since_full++ % stride != 0) {
            continue;
        }
        auto report = step(current);
        run.alerts += report.alert ? 1 : 0;
        if (run.labelled && report.psi + 1 != labels[t]) {
            ++run.misclassified;
        }
        run.reports.push_back(std::move(report));
    }
    return run;
}

nlohmann::json report_json(const MonitorReport& report, bool include_elapsed) {
    nlohmann::json j;
    j["end_index"] = report.end_index;
    if (report.time) {
        j["time"] = *report.time;
    }
    j["psi"] = report.psi;
    j["distances"] = report.distances;
    j["zscore"] = report.zscore ? nlohmann::json(*report.zscore) : nlohmann::json(nullptr);
    j["statistic"] = report.statistic;
    j["threshold"] = report.threshold;
    j["alert"] = report.alert;
    if (include_elapsed) {
        j["elapsed"] = report.elapsed;
    }
    return j;
}

void write_reports_jsonl(std::ostream& out, std::span<const MonitorReport> reports, bool include_elapsed) {
    for (const auto& r : reports) {
        out << report_json(r, include_elapsed).dump() << '\n';
    }
}

void write_reports_csv(std::ostream& out, std::span<const MonitorReport> reports) {
    const bool ranks = !reports.empty() && reports.front().zscore.has_value();
    const std::size_t refs = reports.empty() ? 0 : reports.front().distances.size();
    out << "end_index,psi,statistic,threshold,alert";
    if (ranks) {
        out << ",zscore";
    }
    for (std::size_t k = 0; k < refs; ++k) {
        out << ",d_" << k;
    }
    out << '\n';
    for (const auto& r : reports) {
        out << r.end_index << ',' << r.psi << ',' << core::format_double(r.statistic) << ','
            << core::format_double(r.threshold) << ',' << (r.alert ? 1 : 0);
        if (ranks) {
            out << ',' << core::format_double(r.zscore.value_or(0.0));
        }
        for (double d : r.distances) {
            out << ',' << core::format_double(d);
        }
        out << '\n';
    }
}

}  // namespace depthmon::monitor
