#include <fstream>
#include <stdexcept>
#include <string>

#include "cli.hpp"
#include "depthmon/error.hpp"
#include "json_fields.hpp"

namespace depthmon::cli {

std::string as_string(const json& j, const std::string& what) {
    if (!j.is_string()) {
        throw std::invalid_argument(what + ": expected a string");
    }
    return j.get<std::string>();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

depth::DepthParams depth_params_from_json(const json& j) {
    depth::DepthParams p;
    Fields f(j, "depth");
    f.get("p", p.p);
    f.get("a", p.a);
    f.get("b", p.b);
    f.finish();
    p.validate();
    return p;
}

json to_json(const depth::DepthParams& params) { return {{"p", params.p}, {"a", params.a}, {"b", params.b}}; }

sim::InnovationSpec innovation_from_json(const json& j) {
    sim::InnovationSpec spec;
    Fields f(j, "innovation");
    f.with("family", [&](const json& v) { spec.family = sim::innovation_family_from_string(as_string(v, "family")); });
    f.get("shape", spec.shape);
    f.get("skew", spec.skew);
    f.get("standardized", spec.standardized);
    f.finish();
    spec.validate();
    return spec;
}

json to_json(const sim::InnovationSpec& spec) {
    return {{"family", sim::to_string(spec.family)},
            {"shape", spec.shape},
            {"skew", spec.skew},
            {"standardized", spec.standardized}};
}

sim::SubModel submodel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) {
        throw std::invalid_argument("model: missing 'type' (ar_garch or setar)");
    }
    const auto type = as_string(j.at("type"), "model.type");
    if (type == "ar_garch") {
        sim::ArGarchSpec spec;
        Fields f(j, "ar_garch");
        f.with("type", [](const json&) {});
        f.get("c", spec.c);
        f.get("phi", spec.phi);
        f.get("omega", spec.omega);
        f.get("alpha", spec.alpha);
        f.get("beta", spec.beta);
        f.get("garch_on_residuals", spec.garch_on_residuals);
        f.with("innovation", [&](const json& v) { spec.innovation = innovation_from_json(v); });
        f.finish();
        spec.validate();
        return spec;
    }
    if (type == "setar") {
        sim::SetarSpec spec;
        Fields f(j, "setar");
        f.with("type", [](const json&) {});
        f.get("coefficients", spec.coefficients);
        f.get("thresholds", spec.thresholds);
        f.get("delay", spec.delay);
        f.get("scale", spec.scale);
        f.with("innovation", [&](const json& v) { spec.innovation = innovation_from_json(v); });
        f.finish();
        spec.validate();
        return spec;
    }
    throw std::invalid_argument("model.type: unknown model type '" + type + "'");
}

json to_json(const sim::SubModel& model) {
    if (const auto* ar = std::get_if<sim::ArGarchSpec>(&model)) {
        return {{"type", "ar_garch"},
                {"c", ar->c},
                {"phi", ar->phi},
                {"omega", ar->omega},
                {"alpha", ar->alpha},
                {"beta", ar->beta},
                {"garch_on_residuals", ar->garch_on_residuals},
                {"innovation", to_json(ar->innovation)}};
    }
    const auto& setar = std::get<sim::SetarSpec>(model);
    return {{"type", "setar"},
            {"coefficients", setar.coefficients},
            {"thresholds", setar.thresholds},
            {"delay", setar.delay},
            {"scale", setar.scale},
            {"innovation", to_json(setar.innovation)}};
}

sim::CharmeSpec charme_from_json(const json& j) {
    sim::CharmeSpec spec;
    Fields f(j, "model");
    f.with("models", [&](const json& v) {
        if (!v.is_array()) {
            throw std::invalid_argument("models: expected an array");
        }
        for (const auto& m : v) {
            spec.models.push_back(submodel_from_json(m));
        }
    });
    f.get("transition", spec.transition);
    f.get("initial_label", spec.initial_label);
    f.finish();
    if (spec.models.size() == 1 && spec.transition.empty()) {
        spec.transition = {{1.0}};
    }
    spec.validate();
    return spec;
}

json to_json(const sim::CharmeSpec& spec) {
    json models = json::array();
    for (const auto& m : spec.models) {
        models.push_back(to_json(m));
    }
    return {{"models", models}, {"transition", spec.transition}, {"initial_label", spec.initial_label}};
}

sim::ContaminationSpec contamination_from_json(const json& j) {
    sim::ContaminationSpec spec;
    Fields f(j, "contamination");
    f.get("fraction", spec.fraction);
    f.with("kind", [&](const json& v) { spec.kind = sim::contamination_kind_from_string(as_string(v, "kind")); });
    f.get("location", spec.location);
    f.get("scale", spec.scale);
    f.finish();
    spec.validate();
    return spec;
}

json to_json(const sim::ContaminationSpec& spec) {
    return {{"fraction", spec.fraction},
            {"kind", sim::to_string(spec.kind)},
            {"location", spec.location},
            {"scale", spec.scale}};
}

cde::CdeConfig cde_config_from_json(const json& j) {
    cde::CdeConfig cfg;
    Fields f(j, "cde");
    f.get("lag", cfg.lag);
    f.get("beta", cfg.beta);
    f.get("edges", cfg.edges);
    f.with("beta_mode", [&](const json& v) { cfg.beta_mode = binning::beta_mode_from_string(as_string(v, "beta_mode")); });
    f.get("degree", cfg.degree);
    f.with("bandwidths", [&](const json& v) {
        cde::Bandwidths bw;
        Fields b(v, "cde.bandwidths");
        b.get("hx", bw.hx);
        b.get("hy", bw.hy);
        b.finish();
        cfg.bandwidths = bw;
    });
    f.with("bandwidth_rot_constant", [](const json&) {});  // informational, written by to_json
    f.get("normalize", cfg.normalize);
    f.with("link", [&](const json& v) { cfg.link = cde::link_from_string(as_string(v, "link")); });
    f.with("depth", [&](const json& v) { cfg.depth = depth_params_from_json(v); });
    f.get("condition_points", cfg.condition_points);
    f.get("y_grid", cfg.y_grid);
    f.get("max_conditions", cfg.max_conditions);
    f.get("y_points", cfg.y_points);
    f.get("grid_width", cfg.grid_width);
    f.finish();
    cfg.validate();
    return cfg;
}

json to_json(const cde::CdeConfig& cfg) {
    json bw = nullptr;
    if (cfg.bandwidths) {
        bw = {{"hx", cfg.bandwidths->hx}, {"hy", cfg.bandwidths->hy}};
    }
    return {{"lag", cfg.lag},
            {"beta", cfg.beta},
            {"edges", cfg.edges},
            {"beta_mode", binning::to_string(cfg.beta_mode)},
            {"degree", cfg.degree},
            {"bandwidths", bw},
            {"bandwidth_rot_constant", cde::kRotConstant},
            {"normalize", cfg.normalize},
            {"link", cde::to_string(cfg.link)},
            {"depth", to_json(cfg.depth)},
            {"condition_points", cfg.condition_points},
            {"y_grid", cfg.y_grid},
            {"max_conditions", cfg.max_conditions},
            {"y_points", cfg.y_points},
            {"grid_width", cfg.grid_width}};
}

monitor::MonitorConfig monitor_config_from_json(const json& j) {
    monitor::MonitorConfig cfg;
    Fields f(j, "monitor");
    f.get("window", cfg.window);
    f.get("stride", cfg.stride);
    f.with("cde", [&](const json& v) { cfg.cde = cde_config_from_json(v); });
    f.with("distance", [&](const json& v) { cfg.distance = monitor::distance_kind_from_string(as_string(v, "distance")); });
    f.get("allow_abs_dev", cfg.allow_abs_dev);
    f.get("level", cfg.level);
    f.get("replicates", cfg.replicates);
    f.get("seed", cfg.seed);
    f.with("alert_mode", [&](const json& v) { cfg.alert_mode = monitor::alert_mode_from_string(as_string(v, "alert_mode")); });
    f.get("declared_regime", cfg.declared_regime);
    f.get("adopt_on_alert", cfg.adopt_on_alert);
    f.get("resample_reference", cfg.resample_reference);
    f.get("reference_length", cfg.reference_length);
    f.get("calibration_length", cfg.calibration_length);
    f.get("rank_lag", cfg.rank_lag);
    f.finish();
    cfg.validate();
    return cfg;
}

json to_json(const monitor::MonitorConfig& cfg) {
    return {{"window", cfg.window},
            {"stride", cfg.stride},
            {"cde", to_json(cfg.cde)},
            {"distance", monitor::to_string(cfg.distance)},
            {"allow_abs_dev", cfg.allow_abs_dev},
            {"level", cfg.level},
            {"replicates", cfg.replicates},
            {"seed", cfg.seed},
            {"alert_mode", monitor::to_string(cfg.alert_mode)},
            {"declared_regime", cfg.declared_regime},
            {"adopt_on_alert", cfg.adopt_on_alert},
            {"resample_reference", cfg.resample_reference},
            {"reference_length", cfg.reference_length},
            {"calibration_length", cfg.calibration_length},
            {"rank_lag", cfg.rank_lag}};
}

void EvaluateConfig::validate() const {
    if (models.size() != 2) {
        throw std::invalid_argument("evaluate: exactly two models are required, got " + std::to_string(models.size()));
    }
    for (const auto& m : models) {
        std::visit([](const auto& spec) { spec.validate(); }, m);
    }
    if (shares.empty() || contamination.empty() || estimators.empty()) {
        throw std::invalid_argument("evaluate: shares, contamination and estimators must be nonempty");
    }
    for (double s : shares) {
        if (!(s > 0.0 && s < 1.0)) {
            throw std::invalid_argument("evaluate: share must lie in (0, 1)");
        }
    }
    if (!(switch_rate > 0.0 && switch_rate <= 1.0)) {
        throw std::invalid_argument("evaluate: switch_rate must lie in (0, 1]");
    }
    for (double c : contamination) {
        sim::ContaminationSpec spec;
        spec.fraction = c;
        spec.validate();
    }
    if (!(ao_scale >= 0.0)) {
        throw std::invalid_argument("evaluate: ao_scale must be >= 0");
    }
    if (n <= cde.lag + 10 || reps == 0) {
        throw std::invalid_argument("evaluate: n must exceed lag + 10 and reps must be positive");
    }
    if (pilot_length < 100 || grid_points < 2 || grid_conditions == 0 || !(grid_width > 0.0)) {
        throw std::invalid_argument("evaluate: invalid evaluation grid settings");
    }
    if (truth.length < 100 || truth.neighbours == 0 || truth.neighbours > truth.length) {
        throw std::invalid_argument("evaluate: truth neighbours must lie in [1, length], length >= 100");
    }
    cde.validate();
}

EvaluateConfig evaluate_config_from_json(const json& j) {
    EvaluateConfig cfg;
    Fields f(j, "evaluate");
    f.with("models", [&](const json& v) {
        if (!v.is_array()) {
            throw std::invalid_argument("models: expected an array");
        }
        for (const auto& m : v) {
            cfg.models.push_back(submodel_from_json(m));
        }
    });
    f.get("shares", cfg.shares);
    f.get("switch_rate", cfg.switch_rate);
    f.get("contamination", cfg.contamination);
    f.with("contamination_kind", [](const json& v) {
        if (sim::contamination_kind_from_string(as_string(v, "contamination_kind")) != sim::ContaminationKind::additive) {
            throw std::invalid_argument("evaluate.contamination_kind: only AO is supported");
        }
    });
    f.get("ao_location", cfg.ao_location);
    f.get("ao_scale", cfg.ao_scale);
    f.with("estimators", [&](const json& v) {
        if (!v.is_array()) {
            throw std::invalid_argument("estimators: expected an array");
        }
        cfg.estimators.clear();
        for (const auto& e : v) {
            cfg.estimators.push_back(cde::estimator_from_string(as_string(e, "estimator")));
        }
    });
    f.get("n", cfg.n);
    f.get("reps", cfg.reps);
    f.get("burn_in", cfg.burn_in);
    f.get("pilot_length", cfg.pilot_length);
    f.get("grid_points", cfg.grid_points);
    f.get("grid_conditions", cfg.grid_conditions);
    f.get("grid_width", cfg.grid_width);
    f.with("truth", [&](const json& v) {
        Fields t(v, "evaluate.truth");
        t.get("length", cfg.truth.length);
        t.get("neighbours", cfg.truth.neighbours);
        t.get("burn_in", cfg.truth.burn_in);
        t.finish();
    });
    f.with("cde", [&](const json& v) { cfg.cde = cde_config_from_json(v); });
    f.get("seed", cfg.seed);
    f.finish();
    cfg.validate();
    return cfg;
}

json to_json(const EvaluateConfig& cfg) {
    json models = json::array();
    for (const auto& m : cfg.models) {
        models.push_back(to_json(m));
    }
    json estimators = json::array();
    for (auto e : cfg.estimators) {
        estimators.push_back(cde::to_string(e));
    }
    return {{"models", models},
            {"shares", cfg.shares},
            {"switch_rate", cfg.switch_rate},
            {"contamination", cfg.contamination},
            {"contamination_kind", "AO"},
            {"ao_location", cfg.ao_location},
            {"ao_scale", cfg.ao_scale},
            {"estimators", estimators},
            {"n", cfg.n},
            {"reps", cfg.reps},
            {"burn_in", cfg.burn_in},
            {"pilot_length", cfg.pilot_length},
            {"grid_points", cfg.grid_points},
            {"grid_conditions", cfg.grid_conditions},
            {"grid_width", cfg.grid_width},
            {"truth", {{"length", cfg.truth.length}, {"neighbours", cfg.truth.neighbours}, {"burn_in", cfg.truth.burn_in}}},
            {"cde", to_json(cfg.cde)},
            {"seed", cfg.seed}};
}

}  // namespace depthmon::cli
