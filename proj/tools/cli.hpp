#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthmon/cde.hpp"
#include "depthmon/monitor.hpp"
#include "depthmon/sim.hpp"

// Command-line front end. Every subcommand reads an optional JSON config,
// applies flag overrides on top of it (flags win), validates the result and
// writes plot-ready CSV / JSON-lines output plus a metadata JSON recording the
// resolved parameters, defaults included.
namespace depthmon::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
};

inline constexpr const char* kSchemaVersion = "depthmon/1";

/// Runs the command line `args` (program name excluded). Never throws; errors
/// are reported on `err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// JSON conversions. Readers reject unknown keys and fill missing ones with
// the library defaults; writers emit every field.

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);

[[nodiscard]] depth::DepthParams depth_params_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const depth::DepthParams& params);

[[nodiscard]] sim::InnovationSpec innovation_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const sim::InnovationSpec& spec);

/// {"type": "ar_garch" | "setar", ...model fields}
[[nodiscard]] sim::SubModel submodel_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const sim::SubModel& model);

[[nodiscard]] sim::CharmeSpec charme_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const sim::CharmeSpec& spec);

[[nodiscard]] sim::ContaminationSpec contamination_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const sim::ContaminationSpec& spec);

[[nodiscard]] cde::CdeConfig cde_config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const cde::CdeConfig& cfg);

[[nodiscard]] monitor::MonitorConfig monitor_config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const monitor::MonitorConfig& cfg);

/// A 1-D stream read either from the observation layout (index[,time],v1) or
/// from a trajectory file written by `simulate` (index,value,regime,contaminated).
struct Stream {
    std::vector<core::Observation> observations;
    std::vector<std::size_t> labels;  ///< 1-based regimes; empty unless the file carries them
};

/// Throws IoError on unreadable or malformed files.
[[nodiscard]] Stream read_stream(const std::string& path);

/// Replication study over contamination-free / contaminated two-regime mixes.
struct EvaluateConfig {
    std::vector<sim::SubModel> models;                   ///< exactly two sub-models
    std::vector<double> shares = {0.1, 0.2, 0.3, 0.4};   ///< stationary share of the first model
    double switch_rate = 0.02;                           ///< probability of leaving the current regime, at most
    std::vector<double> contamination = {0.0, 0.1};      ///< AO fractions
    double ao_location = 0.0;                            ///< AO mean in units of the pilot SD
    double ao_scale = 3.0;                               ///< AO SD in units of the pilot SD
    std::vector<cde::Estimator> estimators = {cde::Estimator::kern_baseline, cde::Estimator::locpol_unbinned,
                                              cde::Estimator::prop1};
    std::size_t n = 1000;             ///< window length per replication
    std::size_t reps = 20;
    std::size_t burn_in = sim::kDefaultBurnIn;
    std::size_t pilot_length = 20000; ///< stream used to build the evaluation grid
    std::size_t grid_points = 500;
    std::size_t grid_conditions = 20;
    double grid_width = 5.0;
    sim::TruthConfig truth;
    cde::CdeConfig cde;
    std::uint64_t seed = 1;

    void validate() const;
};

[[nodiscard]] EvaluateConfig evaluate_config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const EvaluateConfig& cfg);

struct Replication {
    std::size_t scenario = 0;
    double share = 0.0;
    double contamination = 0.0;
    std::size_t rep = 0;
    cde::Estimator estimator = cde::Estimator::prop1;
    double distance = 0.0;  ///< summed median absolute deviation from the majority-model truth
    double seconds = 0.0;   ///< estimator wall-clock time
};

struct EvaluateRow {
    std::size_t scenario = 0;
    double share = 0.0;
    double contamination = 0.0;
    cde::Estimator estimator = cde::Estimator::prop1;
    std::size_t reps = 0;
    double mean_distance = 0.0;
    double sd_distance = 0.0;
    double mean_seconds = 0.0;
};

/// Scenario grid shares x contamination. The truth is the density of the
/// majority (second) model; each replication simulates a window of n values,
/// contaminates it and scores every estimator on the common evaluation grid.
/// Replications run on `jobs` threads; results do not depend on `jobs`.
[[nodiscard]] std::vector<Replication> run_replications(const EvaluateConfig& cfg, std::size_t jobs);

[[nodiscard]] std::vector<EvaluateRow> summarize(const std::vector<Replication>& reps);

void write_evaluate_csv(std::ostream& out, const std::vector<EvaluateRow>& rows);
void write_replications_csv(std::ostream& out, const std::vector<Replication>& reps);

}  // namespace depthmon::cli
