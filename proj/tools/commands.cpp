#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "depthmon/csv.hpp"
#include "depthmon/error.hpp"
#include "depthmon/rank.hpp"
#include "json_fields.hpp"

namespace depthmon::cli {
namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

void write_json(const std::string& path, const json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

std::string metadata_path(const std::string& explicit_path, const std::string& output) {
    if (!explicit_path.empty()) {
        return explicit_path;
    }
    std::filesystem::path p(output);
    p.replace_extension(".meta.json");
    return p.string();
}

json header(const std::string& command) { return {{"schema", kSchemaVersion}, {"command", command}}; }

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) {
        err << "warning: " << w << '\n';
    }
}

std::vector<double> values_of(const std::vector<core::Observation>& obs, const std::string& source) {
    std::vector<double> values;
    values.reserve(obs.size());
    for (const auto& o : obs) {
        if (o.value.size() != 1) {
            throw std::invalid_argument(source + ": expected a one-dimensional stream, found dimension " +
                                        std::to_string(o.value.size()));
        }
        values.push_back(o.value[0]);
    }
    return values;
}

// simulate -------------------------------------------------------------------

void cmd_simulate(const json& doc, std::ostream& out, std::ostream& err) {
    json model = to_json(sim::single_model(sim::ArGarchSpec{}));
    std::size_t n = 1000;
    std::size_t burn_in = sim::kDefaultBurnIn;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> contamination_seed;
    json schedule = nullptr;
    sim::ContaminationSpec contamination;
    contamination.fraction = 0.0;
    std::string output = "trajectory.csv";
    std::string metadata;

    Fields f(doc, "simulate");
    f.with("model", [&](const json& v) { model = v; });
    f.get("n", n);
    f.get("burn_in", burn_in);
    f.get("seed", seed);
    f.with("contamination_seed", [&](const json& v) {
        std::uint64_t s = 0;
        Fields(json{{"contamination_seed", v}}, "simulate").get("contamination_seed", s);
        contamination_seed = s;
    });
    f.with("schedule", [&](const json& v) { schedule = v; });
    f.with("contamination", [&](const json& v) { contamination = contamination_from_json(v); });
    f.get("output", output);
    f.get("metadata", metadata);
    f.finish();

    const auto spec = charme_from_json(model);
    if (n == 0) {
        throw std::invalid_argument("simulate: n must be positive");
    }
    sim::Trajectory traj;
    if (schedule.is_null()) {
        traj = sim::simulate_charme(spec, n, burn_in, seed);
    } else {
        std::size_t t_star = n / 2;
        std::size_t from = 1;
        std::size_t to = 2;
        Fields s(schedule, "simulate.schedule");
        s.get("t_star", t_star);
        s.get("from", from);
        s.get("to", to);
        s.finish();
        schedule = {{"t_star", t_star}, {"from", from}, {"to", to}};
        traj = sim::simulate_schedule(spec, sim::switch_schedule(n, t_star, from, to), burn_in, seed);
    }
    const std::uint64_t cseed = contamination_seed.value_or(make_substream(seed, 1)());
    if (contamination.fraction > 0.0) {
        traj = sim::contaminate(traj, contamination, cseed);
    }

    {
        auto csv = open_output(output);
        sim::write_trajectory_csv(csv, traj);
    }
    std::vector<std::size_t> counts(spec.models.size(), 0);
    for (auto label : traj.labels) {
        ++counts[label - 1];
    }
    auto meta = header("simulate");
    meta["seed"] = seed;
    meta["n"] = n;
    meta["burn_in"] = burn_in;
    meta["model"] = to_json(spec);
    try {
        meta["stationary"] = spec.stationary();
    } catch (const NumericalError&) {
        meta["stationary"] = nullptr;  // reducible chain, e.g. a fixed schedule
    }
    meta["schedule"] = schedule;
    meta["contamination"] = to_json(contamination);
    meta["contamination_seed"] = cseed;
    meta["regime_counts"] = counts;
    meta["output"] = output;
    meta["warnings"] = traj.warnings;
    write_json(metadata_path(metadata, output), meta);
    report_warnings(traj.warnings, err);
    out << "wrote " << traj.size() << " observations to " << output << '\n';
}

// monitor --------------------------------------------------------------------

void cmd_monitor(const json& doc, std::ostream& out, std::ostream& err) {
    std::string input;
    int proposal = 1;
    std::vector<std::string> references;
    json monitor_doc = json::object();
    std::string output_jsonl = "monitor.jsonl";
    std::string output_csv = "monitor.csv";
    std::string metadata;
    bool timing = false;

    Fields f(doc, "monitor");
    f.get("input", input);
    f.get("proposal", proposal);
    f.get("references", references);
    f.with("monitor", [&](const json& v) { monitor_doc = v; });
    f.get("output_jsonl", output_jsonl);
    f.get("output_csv", output_csv);
    f.get("metadata", metadata);
    f.get("timing", timing);
    f.finish();

    const auto cfg = monitor_config_from_json(monitor_doc);
    if (input.empty()) {
        throw std::invalid_argument("monitor: 'input' stream is required");
    }
    if (proposal != 1 && proposal != 2) {
        throw std::invalid_argument("monitor: proposal must be 1 or 2, got " + std::to_string(proposal));
    }
    if (proposal == 1 && references.empty()) {
        throw std::invalid_argument("monitor: proposal 1 needs at least one reference file");
    }

    const auto stream = read_stream(input);
    auto meta = header("monitor");
    meta["input"] = input;
    meta["proposal"] = proposal;
    meta["monitor"] = to_json(cfg);

    monitor::MonitorRun run;
    if (proposal == 1) {
        static_cast<void>(values_of(stream.observations, input));
        std::vector<std::vector<double>> samples;
        for (const auto& path : references) {
            samples.push_back(values_of(read_stream(path).observations, path));
        }
        auto refs = monitor::build_references(std::move(samples), cfg.cde);
        monitor::PdMonitor pd(std::move(refs), cfg);
        const auto& ready = pd.references();
        run = monitor::run_monitor(stream.observations, cfg.window, cfg.stride,
                                   [&](const core::Window& w) { return pd.step(w); }, stream.labels);
        meta["references"] = references;
        meta["thresholds"] = ready.thresholds;
        meta["condition_points"] = ready.condition_points();
        meta["y_grid_range"] = {ready.y_grid().front(), ready.y_grid().back()};
        json bandwidths = json::array();
        for (const auto& d : ready.densities) {
            bandwidths.push_back({{"hx", d.bandwidths.hx}, {"hy", d.bandwidths.hy}});
        }
        meta["reference_bandwidths"] = bandwidths;
    } else {
        const std::size_t m = cfg.rank_lag == 0 ? cfg.window : cfg.window - std::min(cfg.rank_lag, cfg.window);
        if (cfg.rank_lag >= cfg.window || cfg.rank_lag >= cfg.reference_length) {
            throw std::invalid_argument("monitor: rank_lag must be smaller than window and reference_length");
        }
        const std::size_t pool_length =
            cfg.calibration_length == 0 ? cfg.reference_length + cfg.window : cfg.calibration_length;
        if (pool_length < cfg.reference_length + cfg.window) {
            throw std::invalid_argument("monitor: calibration_length must be at least reference_length + window (" +
                                        std::to_string(cfg.reference_length + cfg.window) + ")");
        }
        meta["calibration_length"] = pool_length;
        meta["monitoring_starts_at"] = pool_length;
        if (stream.observations.size() < pool_length) {
            run.warnings.push_back("stream of " + std::to_string(stream.observations.size()) +
                                   " observations is shorter than the reference and calibration segment (" +
                                   std::to_string(pool_length) + "); no reports");
        } else {
            auto points = [&](std::size_t count) {
                Sample s;
                if (cfg.rank_lag == 0) {
                    s = Sample(stream.observations.front().value.size());
                    for (std::size_t i = 0; i < count; ++i) {
                        s.push_back(stream.observations[i].value);
                    }
                    return s;
                }
                const auto values = values_of(stream.observations, input);
                return monitor::rank_points(std::span<const double>(values.data(), count), cfg.rank_lag);
            };
            const auto reference = points(cfg.reference_length);
            const auto pool = points(pool_length);
            monitor::WilcoxonMonitor wm(reference, pool, cfg);
            const std::span<const core::Observation> tail(stream.observations.begin() + static_cast<std::ptrdiff_t>(pool_length),
                                                          stream.observations.end());
            std::span<const std::size_t> labels;
            if (!stream.labels.empty()) {
                labels = std::span<const std::size_t>(stream.labels).subspan(pool_length);
            }
            run = monitor::run_monitor(tail, cfg.window, cfg.stride,
                                       [&](const core::Window& w) { return wm.step(w); }, labels);
            meta["threshold"] = wm.threshold();
            meta["ranked_window_points"] = m;
        }
    }

    {
        auto jsonl = open_output(output_jsonl);
        monitor::write_reports_jsonl(jsonl, run.reports, timing);
    }
    {
        auto csv = open_output(output_csv);
        monitor::write_reports_csv(csv, run.reports);
    }
    meta["reports"] = run.reports.size();
    meta["alerts"] = run.alerts;
    meta["alert_rate"] = run.reports.empty() ? 0.0 : static_cast<double>(run.alerts) / static_cast<double>(run.reports.size());
    if (run.labelled && proposal == 1) {
        meta["misclassified"] = run.misclassified;
    }
    meta["output_jsonl"] = output_jsonl;
    meta["output_csv"] = output_csv;
    meta["warnings"] = run.warnings;
    write_json(metadata_path(metadata, output_csv), meta);
    report_warnings(run.warnings, err);
    out << run.reports.size() << " reports, " << run.alerts << " alerts\n";
}

// evaluate -------------------------------------------------------------------

void cmd_evaluate(const json& doc, std::size_t jobs, std::ostream& out) {
    json eval_doc = doc;
    std::string output = "evaluate.csv";
    std::string replications_output;
    std::string metadata;
    for (const char* key : {"output", "replications_output", "metadata", "jobs"}) {
        if (!eval_doc.contains(key)) {
            continue;
        }
        const json v = eval_doc.at(key);
        eval_doc.erase(key);
        Fields f(json{{key, v}}, "evaluate");
        if (std::string(key) == "output") {
            f.get(key, output);
        } else if (std::string(key) == "replications_output") {
            f.get(key, replications_output);
        } else if (std::string(key) == "metadata") {
            f.get(key, metadata);
        } else {
            f.get(key, jobs);
        }
    }
    if (!eval_doc.contains("models")) {
        sim::SetarSpec first;
        first.coefficients = {{1.0, 0.9}, {5.0, -0.9}};
        first.thresholds = {3.0};
        first.delay = 2;
        first.innovation.family = sim::InnovationFamily::student_t;
        first.innovation.shape = 3.0;
        first.innovation.standardized = false;
        sim::SetarSpec second = first;
        second.coefficients = {{1.0, 0.9}, {10.0, -0.9}};
        eval_doc["models"] = {to_json(sim::SubModel(first)), to_json(sim::SubModel(second))};
    }
    const auto cfg = evaluate_config_from_json(eval_doc);
    const auto reps = run_replications(cfg, jobs);
    const auto rows = summarize(reps);
    {
        auto csv = open_output(output);
        write_evaluate_csv(csv, rows);
    }
    if (!replications_output.empty()) {
        auto csv = open_output(replications_output);
        write_replications_csv(csv, reps);
    }
    auto meta = header("evaluate");
    meta["evaluate"] = to_json(cfg);
    meta["jobs"] = jobs;
    meta["truth_model"] = 2;
    meta["output"] = output;
    if (!replications_output.empty()) {
        meta["replications_output"] = replications_output;
    }
    write_json(metadata_path(metadata, output), meta);
    out << rows.size() << " rows written to " << output << '\n';
}

// depth ----------------------------------------------------------------------

void cmd_depth(const json& doc, std::ostream& out) {
    std::string input;
    std::string second;
    depth::DepthParams params;
    std::string output = "depth.csv";
    std::string metadata;
    Fields f(doc, "depth");
    f.get("input", input);
    f.get("second", second);
    f.with("depth", [&](const json& v) { params = depth_params_from_json(v); });
    f.get("output", output);
    f.get("metadata", metadata);
    f.finish();
    params.validate();
    if (input.empty()) {
        throw std::invalid_argument("depth: 'input' is required");
    }

    auto to_sample = [](const std::vector<core::Observation>& obs) {
        std::vector<std::vector<double>> rows;
        rows.reserve(obs.size());
        for (const auto& o : obs) {
            rows.push_back(o.value);
        }
        return Sample::from_rows(rows);
    };
    const auto x_obs = core::read_observations_csv(std::filesystem::path(input));
    if (x_obs.empty()) {
        throw std::invalid_argument(input + ": no observations");
    }
    const auto x = to_sample(x_obs);

    auto meta = header("depth");
    meta["input"] = input;
    meta["depth"] = to_json(params);
    meta["output"] = output;
    auto csv = open_output(output);
    if (second.empty()) {
        const auto d = depth::depth_all(x, params);
        csv << "index,depth\n";
        for (std::size_t i = 0; i < d.size(); ++i) {
            csv << x_obs[i].index << ',' << core::format_double(d[i]) << '\n';
        }
        meta["points"] = d.size();
        meta["deepest_index"] = x_obs[depth::deepest_index(d)].index;
    } else {
        const auto y_obs = core::read_observations_csv(std::filesystem::path(second));
        if (y_obs.empty()) {
            throw std::invalid_argument(second + ": no observations");
        }
        const auto y = to_sample(y_obs);
        if (x.dim() != y.dim()) {
            throw std::invalid_argument("depth: dimension mismatch between " + input + " (" + std::to_string(x.dim()) +
                                        ") and " + second + " (" + std::to_string(y.dim()) + ")");
        }
        const auto dd = rank::dd_plot(x, y, params);
        csv << "sample,index,depth_first,depth_second\n";
        for (std::size_t i = 0; i < dd.points.size(); ++i) {
            const bool first = i < dd.n;
            const auto index = first ? x_obs[i].index : y_obs[i - dd.n].index;
            csv << (first ? 1 : 2) << ',' << index << ',' << core::format_double(dd.points[i].first) << ','
                << core::format_double(dd.points[i].second) << '\n';
        }
        meta["second"] = second;
        meta["points"] = dd.points.size();
    }
    write_json(metadata_path(metadata, output), meta);
    out << "wrote " << output << '\n';
}

json load_config(const std::string& path) { return path.empty() ? json::object() : read_json_file(path); }

template <typename T>
void override_key(const CLI::Option* opt, json& doc, const std::string& key, const T& value) {
    if (opt->count() > 0) {
        doc[key] = value;
    }
}

}  // namespace

Stream read_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') {
        first.pop_back();
    }
    Stream stream;
    if (first != "index,value,regime,contaminated") {
        in.clear();
        in.seekg(0);
        stream.observations = core::read_observations_csv(in, path);
        return stream;
    }
    std::string line;
    std::size_t line_no = 1;
    auto number = [&](std::string_view field) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
            throw IoError(path + ":" + std::to_string(line_no) + ": non-numeric field '" + std::string(field) + "'");
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (auto comma = rest.find(','); comma != std::string_view::npos; comma = rest.find(',')) {
            fields.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 4) {
            throw IoError(path + ":" + std::to_string(line_no) + ": expected 4 fields, found " +
                          std::to_string(fields.size()));
        }
        const double index = number(fields[0]);
        const double regime = number(fields[2]);
        if (index < 0 || regime < 1) {
            throw IoError(path + ":" + std::to_string(line_no) + ": invalid index or regime");
        }
        core::Observation obs;
        obs.index = static_cast<std::size_t>(index);
        obs.value = {number(fields[1])};
        if (!stream.observations.empty() && obs.index <= stream.observations.back().index) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": index must increase");
        }
        stream.observations.push_back(std::move(obs));
        stream.labels.push_back(static_cast<std::size_t>(regime));
    }
    return stream;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Depth-based monitoring of regime-switching streams", "depthmon"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a CHARME / SETAR / AR-GARCH trajectory");
    std::string sim_config;
    std::size_t sim_n = 0;
    std::size_t sim_burn = 0;
    std::size_t sim_t_star = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_output;
    std::string sim_meta;
    double c_fraction = 0.0;
    std::string c_kind;
    double c_location = 0.0;
    double c_scale = 0.0;
    sim_cmd->add_option("-c,--config", sim_config, "JSON config file")->check(CLI::ExistingFile);
    auto* o_sim_n = sim_cmd->add_option("-n,--n", sim_n, "number of observations");
    auto* o_sim_burn = sim_cmd->add_option("--burn-in", sim_burn, "discarded leading observations");
    auto* o_sim_seed = sim_cmd->add_option("-s,--seed", sim_seed, "random seed");
    auto* o_sim_t = sim_cmd->add_option("--t-star", sim_t_star, "switch from regime 1 to 2 at this index");
    auto* o_sim_out = sim_cmd->add_option("-o,--output", sim_output, "trajectory CSV");
    auto* o_sim_meta = sim_cmd->add_option("--metadata", sim_meta, "metadata JSON (default <output>.meta.json)");
    auto* o_cf = sim_cmd->add_option("--contamination-fraction", c_fraction, "outlier fraction in [0, 1]");
    auto* o_ck = sim_cmd->add_option("--contamination-kind", c_kind, "AO or IO");
    auto* o_cl = sim_cmd->add_option("--contamination-location", c_location, "AO mean");
    auto* o_cs = sim_cmd->add_option("--contamination-scale", c_scale, "AO standard deviation");

    // monitor
    auto* mon_cmd = app.add_subcommand("monitor", "Monitor a stream with Proposal 1 (densities) or 2 (ranks)");
    std::string mon_config;
    std::string mon_input;
    int mon_proposal = 1;
    std::vector<std::string> mon_refs;
    std::size_t mon_window = 0;
    std::size_t mon_stride = 0;
    std::size_t mon_reps = 0;
    std::size_t mon_ref_len = 0;
    double mon_level = 0.0;
    std::uint64_t mon_seed = 0;
    std::string mon_distance;
    std::string mon_jsonl;
    std::string mon_csv;
    std::string mon_meta;
    bool mon_timing = false;
    mon_cmd->add_option("-c,--config", mon_config, "JSON config file")->check(CLI::ExistingFile);
    auto* o_mi = mon_cmd->add_option("-i,--input", mon_input, "stream CSV");
    auto* o_mp = mon_cmd->add_option("-p,--proposal", mon_proposal, "1 or 2");
    auto* o_mr = mon_cmd->add_option("-r,--reference", mon_refs, "reference sample CSV (Proposal 1, repeatable)");
    auto* o_mw = mon_cmd->add_option("-w,--window", mon_window, "window length");
    auto* o_ms = mon_cmd->add_option("--stride", mon_stride, "report every k arrivals");
    auto* o_mb = mon_cmd->add_option("-B,--replicates", mon_reps, "bootstrap replicates");
    auto* o_ml = mon_cmd->add_option("--level", mon_level, "alert level alpha");
    auto* o_mrl = mon_cmd->add_option("--reference-length", mon_ref_len, "Proposal 2 reference length");
    auto* o_mseed = mon_cmd->add_option("-s,--seed", mon_seed, "bootstrap seed");
    auto* o_md = mon_cmd->add_option("--distance", mon_distance, "hellinger or kolmogorov");
    auto* o_mj = mon_cmd->add_option("--output-jsonl", mon_jsonl, "JSON-lines report stream");
    auto* o_mc = mon_cmd->add_option("--output-csv", mon_csv, "CSV statistic series");
    auto* o_mm = mon_cmd->add_option("--metadata", mon_meta, "metadata JSON (default <output-csv>.meta.json)");
    auto* o_mt = mon_cmd->add_flag("--timing", mon_timing, "include per-step wall-clock time in JSON lines");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Compare estimators against the true predictive density");
    std::string eval_config;
    std::size_t eval_jobs = 1;
    std::size_t eval_reps = 0;
    std::size_t eval_n = 0;
    std::uint64_t eval_seed = 0;
    std::vector<std::string> eval_estimators;
    std::string eval_output;
    std::string eval_reps_output;
    std::string eval_meta;
    eval_cmd->add_option("-c,--config", eval_config, "JSON config file")->check(CLI::ExistingFile);
    eval_cmd->add_option("-j,--jobs", eval_jobs, "worker threads")->check(CLI::PositiveNumber);
    auto* o_er = eval_cmd->add_option("--reps", eval_reps, "replications per scenario");
    auto* o_en = eval_cmd->add_option("-n,--n", eval_n, "window length per replication");
    auto* o_es = eval_cmd->add_option("-s,--seed", eval_seed, "random seed");
    auto* o_ee = eval_cmd->add_option("-e,--estimator", eval_estimators,
                                      "kern_baseline, locpol_unbinned or prop1 (repeatable)");
    auto* o_eo = eval_cmd->add_option("-o,--output", eval_output, "summary CSV");
    auto* o_ero = eval_cmd->add_option("--replications-output", eval_reps_output, "per-replication CSV");
    auto* o_em = eval_cmd->add_option("--metadata", eval_meta, "metadata JSON (default <output>.meta.json)");

    // depth
    auto* depth_cmd = app.add_subcommand("depth", "Depth of every point, or a DD-plot of two samples");
    std::string depth_config;
    std::string depth_input;
    std::string depth_second;
    std::string depth_output;
    std::string depth_meta;
    double depth_p = 0.0;
    double depth_a = 0.0;
    double depth_b = 0.0;
    depth_cmd->add_option("-c,--config", depth_config, "JSON config file")->check(CLI::ExistingFile);
    auto* o_di = depth_cmd->add_option("-i,--input", depth_input, "observation CSV");
    auto* o_d2 = depth_cmd->add_option("--second", depth_second, "second observation CSV (DD-plot)");
    auto* o_dp = depth_cmd->add_option("--p", depth_p, "norm order");
    auto* o_da = depth_cmd->add_option("--a", depth_a, "weight intercept");
    auto* o_db = depth_cmd->add_option("--b", depth_b, "weight slope");
    auto* o_do = depth_cmd->add_option("-o,--output", depth_output, "output CSV");
    auto* o_dm = depth_cmd->add_option("--metadata", depth_meta, "metadata JSON (default <output>.meta.json)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim_cmd->parsed()) {
            auto doc = load_config(sim_config);
            override_key(o_sim_n, doc, "n", sim_n);
            override_key(o_sim_burn, doc, "burn_in", sim_burn);
            override_key(o_sim_seed, doc, "seed", sim_seed);
            override_key(o_sim_out, doc, "output", sim_output);
            override_key(o_sim_meta, doc, "metadata", sim_meta);
            if (o_sim_t->count() > 0) {
                auto schedule = doc.value("schedule", json::object());
                schedule["t_star"] = sim_t_star;
                doc["schedule"] = schedule;
            }
            if (o_cf->count() + o_ck->count() + o_cl->count() + o_cs->count() > 0) {
                auto c = doc.value("contamination", json::object());
                override_key(o_cf, c, "fraction", c_fraction);
                override_key(o_ck, c, "kind", c_kind);
                override_key(o_cl, c, "location", c_location);
                override_key(o_cs, c, "scale", c_scale);
                doc["contamination"] = c;
            }
            cmd_simulate(doc, out, err);
        } else if (mon_cmd->parsed()) {
            auto doc = load_config(mon_config);
            override_key(o_mi, doc, "input", mon_input);
            override_key(o_mp, doc, "proposal", mon_proposal);
            override_key(o_mr, doc, "references", mon_refs);
            override_key(o_mj, doc, "output_jsonl", mon_jsonl);
            override_key(o_mc, doc, "output_csv", mon_csv);
            override_key(o_mm, doc, "metadata", mon_meta);
            override_key(o_mt, doc, "timing", mon_timing);
            auto m = doc.value("monitor", json::object());
            override_key(o_mw, m, "window", mon_window);
            override_key(o_ms, m, "stride", mon_stride);
            override_key(o_mb, m, "replicates", mon_reps);
            override_key(o_ml, m, "level", mon_level);
            override_key(o_mrl, m, "reference_length", mon_ref_len);
            override_key(o_mseed, m, "seed", mon_seed);
            override_key(o_md, m, "distance", mon_distance);
            doc["monitor"] = m;
            cmd_monitor(doc, out, err);
        } else if (eval_cmd->parsed()) {
            auto doc = load_config(eval_config);
            override_key(o_er, doc, "reps", eval_reps);
            override_key(o_en, doc, "n", eval_n);
            override_key(o_es, doc, "seed", eval_seed);
            override_key(o_ee, doc, "estimators", eval_estimators);
            override_key(o_eo, doc, "output", eval_output);
            override_key(o_ero, doc, "replications_output", eval_reps_output);
            override_key(o_em, doc, "metadata", eval_meta);
            std::size_t jobs = eval_jobs;
            if (doc.contains("jobs") && eval_cmd->get_option("--jobs")->count() > 0) {
                doc.erase("jobs");
            }
            cmd_evaluate(doc, jobs, out);
        } else if (depth_cmd->parsed()) {
            auto doc = load_config(depth_config);
            override_key(o_di, doc, "input", depth_input);
            override_key(o_d2, doc, "second", depth_second);
            override_key(o_do, doc, "output", depth_output);
            override_key(o_dm, doc, "metadata", depth_meta);
            if (o_dp->count() + o_da->count() + o_db->count() > 0) {
                auto d = doc.value("depth", json::object());
                override_key(o_dp, d, "p", depth_p);
                override_key(o_da, d, "a", depth_a);
                override_key(o_db, d, "b", depth_b);
                doc["depth"] = d;
            }
            cmd_depth(doc, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::exception& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace depthmon::cli
