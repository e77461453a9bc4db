#include "depthmon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "depthmon/csv.hpp"
#include "depthmon/distance.hpp"
#include "depthmon/error.hpp"
#include "depthmon/stats.hpp"

namespace depthmon::sim {
namespace {

constexpr double kRowSumTolerance = 1e-9;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

// Unit-variance scale factors for the symmetric base laws.
double t_scale(double nu, bool standardized) { return standardized ? std::sqrt((nu - 2.0) / nu) : 1.0; }

double ged_lambda(double nu, bool standardized) {
    if (!standardized) {
        return 1.0;
    }
    return std::sqrt(std::pow(2.0, -2.0 / nu) * std::tgamma(1.0 / nu) / std::tgamma(3.0 / nu));
}

double base_pdf(const InnovationSpec& s, double x) {
    switch (s.family) {
        case InnovationFamily::normal:
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        case InnovationFamily::student_t: {
            const double nu = s.shape;
            const double scale = t_scale(nu, s.standardized);
            const double t = x / scale;
            const double log_density = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                                       0.5 * std::log(nu * std::numbers::pi) -
                                       0.5 * (nu + 1.0) * std::log1p(t * t / nu);
            return std::exp(log_density) / scale;
        }
        case InnovationFamily::ged: {
            const double nu = s.shape;
            const double lambda = ged_lambda(nu, s.standardized);
            const double norm = nu / (lambda * std::pow(2.0, 1.0 + 1.0 / nu) * std::tgamma(1.0 / nu));
            return norm * std::exp(-0.5 * std::pow(std::abs(x / lambda), nu));
        }
        case InnovationFamily::degenerate:
            break;
    }
    throw std::invalid_argument("degenerate innovations have no density");
}

// E|X| under the base law.
double base_abs_mean(const InnovationSpec& s) {
    switch (s.family) {
        case InnovationFamily::normal:
            return std::sqrt(2.0 / std::numbers::pi);
        case InnovationFamily::student_t: {
            const double nu = s.shape;
            const double raw = 2.0 * std::sqrt(nu) * std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                               ((nu - 1.0) * std::sqrt(std::numbers::pi));
            return raw * t_scale(nu, s.standardized);
        }
        case InnovationFamily::ged: {
            const double nu = s.shape;
            return std::pow(2.0, 1.0 / nu) * ged_lambda(nu, s.standardized) * std::tgamma(2.0 / nu) /
                   std::tgamma(1.0 / nu);
        }
        case InnovationFamily::degenerate:
            return 0.0;
    }
    return 0.0;
}

double base_draw(const InnovationSpec& s, Rng& rng) {
    switch (s.family) {
        case InnovationFamily::normal:
            return std::normal_distribution<double>(0.0, 1.0)(rng);
        case InnovationFamily::student_t:
            return std::student_t_distribution<double>(s.shape)(rng) * t_scale(s.shape, s.standardized);
        case InnovationFamily::ged: {
            // 0.5 |X / lambda|^nu is Gamma(1 / nu, 1).
            const double w = std::gamma_distribution<double>(1.0 / s.shape, 1.0)(rng);
            const double magnitude = ged_lambda(s.shape, s.standardized) * std::pow(2.0 * w, 1.0 / s.shape);
            return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
        }
        case InnovationFamily::degenerate:
            return 0.0;
    }
    return 0.0;
}

// Mean and standard deviation of the skewed law built from a unit-variance base.
struct SkewMoments {
    double mu = 0.0;
    double sigma = 1.0;
};

SkewMoments skew_moments(const InnovationSpec& s) {
    const double xi = s.skew;
    const double m1 = base_abs_mean(s);
    SkewMoments out;
    out.mu = m1 * (xi - 1.0 / xi);
    out.sigma = std::sqrt((1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0);
    return out;
}

std::size_t history_length(const CharmeSpec& spec) {
    std::size_t h = 2;
    for (const auto& model : spec.models) {
        if (const auto* setar = std::get_if<SetarSpec>(&model)) {
            h = std::max({h, setar->order(), setar->delay});
        }
    }
    return h;
}

double start_value(const SubModel& model) {
    if (const auto* ar = std::get_if<ArGarchSpec>(&model)) {
        return ar->unconditional_mean();
    }
    return 0.0;
}

const InnovationSpec& innovation_of(const SubModel& model) {
    return std::visit([](const auto& m) -> const InnovationSpec& { return m.innovation; }, model);
}

// Shared state of all sub-models: the common value history and each AR-GARCH
// sub-model's variance for the upcoming step.
class Engine {
public:
    Engine(const CharmeSpec& spec, std::size_t first_model) : spec_(spec) {
        const double x0 = start_value(spec.models[first_model]);
        history_.assign(history_length(spec), x0);
        next_var_.assign(spec.models.size(), 0.0);
        for (std::size_t j = 0; j < spec.models.size(); ++j) {
            if (const auto* ar = std::get_if<ArGarchSpec>(&spec.models[j])) {
                const double var0 = ar->beta < 1.0 ? ar->omega / (1.0 - ar->beta) : ar->omega;
                const double shock0 = ar->garch_on_residuals ? 0.0 : x0;
                next_var_[j] = garch_variance_step(*ar, std::max(var0, ar->omega), shock0);
            }
        }
    }

    struct Step {
        double value;
        double location;
        double scale;
    };

    Step step(std::size_t k, Rng& rng) {
        Step out{};
        const auto& model = spec_.models[k];
        if (const auto* ar = std::get_if<ArGarchSpec>(&model)) {
            out.location = ar->c + ar->phi * history_[0];
            out.scale = std::sqrt(next_var_[k]);
        } else {
            const auto& setar = std::get<SetarSpec>(model);
            out.location = setar.predictor(history_);
            out.scale = setar.scale;
        }
        out.value = out.location + out.scale * innovation_of(model).draw(rng);
        if (!std::isfinite(out.value)) {
            throw NumericalError("simulated stream diverged");
        }
        for (std::size_t j = 0; j < spec_.models.size(); ++j) {
            if (const auto* ar = std::get_if<ArGarchSpec>(&spec_.models[j])) {
                const double shock =
                    ar->garch_on_residuals ? out.value - ar->c - ar->phi * history_[0] : out.value;
                next_var_[j] = garch_variance_step(*ar, next_var_[j], shock);
            }
        }
        std::rotate(history_.rbegin(), history_.rbegin() + 1, history_.rend());
        history_[0] = out.value;
        return out;
    }

private:
    const CharmeSpec& spec_;
    std::vector<double> history_;  // most recent first
    std::vector<double> next_var_;
};

std::vector<std::string> spec_warnings(const CharmeSpec& spec) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < spec.models.size(); ++j) {
        if (const auto* ar = std::get_if<ArGarchSpec>(&spec.models[j]); ar && ar->explosive()) {
            out.push_back("sub-model " + std::to_string(j + 1) + ": alpha + beta = " +
                          std::to_string(ar->alpha + ar->beta) + " >= 1, the variance recursion is not mean-reverting");
        }
    }
    return out;
}

template <typename NextLabel>
Trajectory run(const CharmeSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed,
               std::size_t first_label, NextLabel next_label) {
    Trajectory traj;
    traj.seed = seed;
    traj.warnings = spec_warnings(spec);
    traj.values.reserve(n);
    traj.labels.reserve(n);
    traj.location.reserve(n);
    traj.scale.reserve(n);
    Rng innovations = make_substream(seed, 1);
    Engine engine(spec, first_label - 1);
    std::size_t label = first_label;
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        if (t > 0) {
            label = next_label(t, label);
        }
        const auto s = engine.step(label - 1, innovations);
        if (t >= burn_in) {
            traj.values.push_back(s.value);
            traj.labels.push_back(label);
            traj.location.push_back(s.location);
            traj.scale.push_back(s.scale);
        }
    }
    traj.contaminated.assign(n, false);
    return traj;
}

}  // namespace

const char* to_string(InnovationFamily family) noexcept {
    switch (family) {
        case InnovationFamily::normal:
            return "normal";
        case InnovationFamily::student_t:
            return "student_t";
        case InnovationFamily::ged:
            return "ged";
        case InnovationFamily::degenerate:
            return "degenerate";
    }
    return "unknown";
}

InnovationFamily innovation_family_from_string(const std::string& name) {
    for (auto f : {InnovationFamily::normal, InnovationFamily::student_t, InnovationFamily::ged,
                   InnovationFamily::degenerate}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw std::invalid_argument("unknown innovation family '" + name +
                                "' (expected normal, student_t, ged or degenerate)");
}

void InnovationSpec::validate() const {
    if (!(skew > 0.0) || !std::isfinite(skew)) {
        throw std::invalid_argument("innovation skew must be positive");
    }
    if (family == InnovationFamily::student_t && !(shape > 2.0 && std::isfinite(shape))) {
        throw std::invalid_argument("student_t innovations need df > 2, got " + std::to_string(shape));
    }
    if (family == InnovationFamily::ged && !(shape > 0.0 && std::isfinite(shape))) {
        throw std::invalid_argument("ged innovations need shape > 0, got " + std::to_string(shape));
    }
}

double InnovationSpec::pdf(double z) const {
    if (family == InnovationFamily::degenerate) {
        throw std::invalid_argument("degenerate innovations have no density");
    }
    if (skew == 1.0) {
        return base_pdf(*this, z);
    }
    const double g = 2.0 / (skew + 1.0 / skew);
    double w = z;
    double jacobian = 1.0;
    if (standardized) {
        const auto m = skew_moments(*this);
        w = z * m.sigma + m.mu;
        jacobian = m.sigma;
    }
    const double stretch = w >= 0.0 ? skew : 1.0 / skew;
    return g * base_pdf(*this, w / stretch) * jacobian;
}

double InnovationSpec::draw(Rng& rng) const {
    if (family == InnovationFamily::degenerate) {
        return 0.0;
    }
    if (skew == 1.0) {
        return base_draw(*this, rng);
    }
    const double magnitude = std::abs(base_draw(*this, rng));
    const double positive_share = skew * skew / (1.0 + skew * skew);
    const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < positive_share ? skew * magnitude
                                                                                              : -magnitude / skew;
    if (!standardized) {
        return w;
    }
    const auto m = skew_moments(*this);
    return (w - m.mu) / m.sigma;
}

void ArGarchSpec::validate() const {
    require_finite(c, "c");
    require_finite(phi, "phi");
    if (phi == 1.0) {
        throw std::invalid_argument("phi = 1 has no unconditional AR mean");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("omega must be positive");
    }
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("alpha and beta must be nonnegative");
    }
    innovation.validate();
}

double ArGarchSpec::unconditional_mean() const { return c / (1.0 - phi); }

double garch_variance_step(const ArGarchSpec& spec, double previous_variance, double previous_shock) {
    return spec.omega + spec.beta * previous_variance + spec.alpha * previous_shock * previous_shock;
}

void SetarSpec::validate() const {
    if (coefficients.empty()) {
        throw std::invalid_argument("SETAR needs at least one regime");
    }
    for (const auto& row : coefficients) {
        if (row.empty()) {
            throw std::invalid_argument("SETAR coefficient rows need an intercept");
        }
        for (double b : row) {
            require_finite(b, "SETAR coefficient");
        }
    }
    if (thresholds.size() + 1 != coefficients.size()) {
        throw std::invalid_argument("SETAR with " + std::to_string(coefficients.size()) + " regimes needs " +
                                    std::to_string(coefficients.size() - 1) + " thresholds");
    }
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        require_finite(thresholds[j], "SETAR threshold");
        if (j > 0 && !(thresholds[j] > thresholds[j - 1])) {
            throw std::invalid_argument("SETAR thresholds must be strictly ascending");
        }
    }
    if (delay == 0) {
        throw std::invalid_argument("SETAR delay must be at least 1");
    }
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("SETAR noise scale must be nonnegative");
    }
    innovation.validate();
}

std::size_t SetarSpec::order() const noexcept {
    std::size_t p = 0;
    for (const auto& row : coefficients) {
        p = std::max(p, row.size() - 1);
    }
    return p;
}

std::size_t SetarSpec::regime(double delay_value) const noexcept {
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (delay_value <= thresholds[j]) {
            return j;
        }
    }
    return thresholds.size();
}

double SetarSpec::predictor(std::span<const double> history) const {
    if (history.size() < std::max(order(), delay)) {
        throw std::invalid_argument("SETAR history shorter than order and delay");
    }
    const auto& row = coefficients[regime(history[delay - 1])];
    double value = row[0];
    for (std::size_t i = 1; i < row.size(); ++i) {
        value += row[i] * history[i - 1];
    }
    return value;
}

void CharmeSpec::validate() const {
    const std::size_t m = models.size();
    if (m == 0) {
        throw std::invalid_argument("CHARME needs at least one sub-model");
    }
    for (const auto& model : models) {
        std::visit([](const auto& s) { s.validate(); }, model);
    }
    if (transition.size() != m) {
        throw std::invalid_argument("transition matrix must be " + std::to_string(m) + " x " + std::to_string(m));
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (transition[i].size() != m) {
            throw std::invalid_argument("transition row " + std::to_string(i + 1) + " has " +
                                        std::to_string(transition[i].size()) + " entries, expected " +
                                        std::to_string(m));
        }
        double sum = 0.0;
        for (double p : transition[i]) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw std::invalid_argument("transition row " + std::to_string(i + 1) +
                                            " has a negative or non-finite entry");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw std::invalid_argument("transition row " + std::to_string(i + 1) + " sums to " +
                                        core::format_double(sum) + ", expected 1");
        }
    }
    if (initial_label < 1 || initial_label > m) {
        throw std::invalid_argument("initial label must lie in 1.." + std::to_string(m));
    }
}

std::vector<double> CharmeSpec::stationary() const {
    validate();
    const std::size_t m = models.size();
    // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            a[r][c] = transition[c][r] - (r == c ? 1.0 : 0.0);
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        a[m - 1][c] = 1.0;
    }
    a[m - 1][m] = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(a[pivot][col]) < 1e-12) {
            throw NumericalError("transition matrix has no unique stationary distribution");
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= m; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < m; ++i) {
        pi[i] = a[i][m] / a[i][i];
    }
    return pi;
}

CharmeSpec single_model(SubModel model) {
    CharmeSpec spec;
    spec.models.push_back(std::move(model));
    spec.transition = {{1.0}};
    return spec;
}

std::vector<std::vector<double>> two_state_transition(double share, double rate) {
    if (!(share > 0.0 && share < 1.0)) {
        throw std::invalid_argument("regime share must lie in (0, 1)");
    }
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("switching rate must lie in (0, 1]");
    }
    const double leave_first = rate * (1.0 - share);
    const double leave_second = rate * share;
    return {{1.0 - leave_first, leave_first}, {leave_second, 1.0 - leave_second}};
}

Trajectory simulate_charme(const CharmeSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    spec.validate();
    Rng chain = make_substream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = spec.models.size();
    return run(spec, n, burn_in, seed, spec.initial_label, [&](std::size_t, std::size_t label) {
        const auto& row = spec.transition[label - 1];
        const double u = unit(chain);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += row[j];
            if (u < acc) {
                return j + 1;
            }
        }
        // Rounding left u above the accumulated row sum: take the last reachable state.
        for (std::size_t j = m; j-- > 0;) {
            if (row[j] > 0.0) {
                return j + 1;
            }
        }
        return label;
    });
}

Trajectory simulate_schedule(const CharmeSpec& spec, std::span<const std::size_t> labels, std::size_t burn_in,
                             std::uint64_t seed) {
    spec.validate();
    for (std::size_t label : labels) {
        if (label < 1 || label > spec.models.size()) {
            throw std::invalid_argument("schedule label " + std::to_string(label) + " outside 1.." +
                                        std::to_string(spec.models.size()));
        }
    }
    if (labels.empty()) {
        Trajectory empty;
        empty.seed = seed;
        return empty;
    }
    return run(spec, labels.size(), burn_in, seed, labels[0], [&](std::size_t t, std::size_t) {
        return t < burn_in ? labels[0] : labels[t - burn_in];
    });
}

std::vector<std::size_t> switch_schedule(std::size_t n, std::size_t t_star, std::size_t from, std::size_t to) {
    std::vector<std::size_t> labels(n, from);
    for (std::size_t t = std::min(t_star, n); t < n; ++t) {
        labels[t] = to;
    }
    return labels;
}

Trajectory simulate_ar_garch(const ArGarchSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    return simulate_charme(single_model(spec), n, burn_in, seed);
}

Trajectory simulate_setar(const SetarSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    return simulate_charme(single_model(spec), n, burn_in, seed);
}

const char* to_string(ContaminationKind kind) noexcept {
    return kind == ContaminationKind::additive ? "AO" : "IO";
}

ContaminationKind contamination_kind_from_string(const std::string& name) {
    if (name == "AO" || name == "ao" || name == "additive") {
        return ContaminationKind::additive;
    }
    if (name == "IO" || name == "io" || name == "innovative") {
        return ContaminationKind::innovative;
    }
    throw std::invalid_argument("unknown contamination kind '" + name + "' (expected AO or IO)");
}

void ContaminationSpec::validate() const {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("contamination fraction must lie in [0, 1], got " + std::to_string(fraction));
    }
    require_finite(location, "contamination location");
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("contamination scale must be nonnegative");
    }
}

double OutlierMixture::draw(Rng& rng) const {
    const auto j = std::uniform_int_distribution<std::size_t>(0, means.size() - 1)(rng);
    return means[j] + sds[j] * std::normal_distribution<double>(0.0, 1.0)(rng);
}

OutlierMixture outlier_mixture(std::span<const double> clean) {
    if (clean.empty()) {
        throw std::invalid_argument("outlier mixture needs clean values");
    }
    OutlierMixture mix;
    const double spread = 0.5 * stats::mad(clean);
    for (double q : {0.2, 0.3, 0.4, 0.6, 0.7, 0.8}) {
        mix.means.push_back(stats::quantile(clean, q));
        mix.sds.push_back(spread);
    }
    mix.means.push_back(stats::median(clean));
    mix.sds.push_back(10.0 * stats::sd(clean));
    return mix;
}

Trajectory contaminate(const Trajectory& traj, const ContaminationSpec& spec, std::uint64_t seed) {
    spec.validate();
    Trajectory out = traj;
    out.contaminated.resize(traj.size(), false);
    if (spec.fraction == 0.0 || traj.size() == 0) {
        return out;
    }
    Rng rng = make_substream(seed, 0);
    std::bernoulli_distribution flag(spec.fraction);
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (flag(rng)) {
            flagged.push_back(i);
        }
    }
    if (spec.kind == ContaminationKind::additive) {
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t i : flagged) {
            out.values[i] = traj.values[i] + spec.location + spec.scale * noise(rng);
            out.contaminated[i] = true;
        }
    } else {
        const auto mix = outlier_mixture(traj.values);
        for (std::size_t i : flagged) {
            out.values[i] = mix.draw(rng);
            out.contaminated[i] = true;
        }
    }
    return out;
}

std::vector<double> true_conditional_density(const SetarSpec& spec, double a, std::span<const double> y_grid) {
    spec.validate();
    if (!(spec.scale > 0.0)) {
        throw std::invalid_argument("SETAR with zero noise scale has no density");
    }
    const std::vector<double> history(std::max(spec.order(), spec.delay), a);
    const double location = spec.predictor(history);
    std::vector<double> out(y_grid.size());
    for (std::size_t g = 0; g < y_grid.size(); ++g) {
        out[g] = spec.innovation.pdf((y_grid[g] - location) / spec.scale) / spec.scale;
    }
    return out;
}

std::vector<double> true_conditional_density(const ArGarchSpec& spec, double a, double sigma,
                                             std::span<const double> y_grid) {
    spec.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("AR-GARCH density needs a positive current volatility");
    }
    const double location = spec.c + spec.phi * a;
    std::vector<double> out(y_grid.size());
    for (std::size_t g = 0; g < y_grid.size(); ++g) {
        out[g] = spec.innovation.pdf((y_grid[g] - location) / sigma) / sigma;
    }
    return out;
}

std::vector<double> true_conditional_density(const CharmeSpec& spec, double a, std::span<const double> y_grid) {
    spec.validate();
    if (spec.models.size() != 1) {
        throw std::invalid_argument(
            "a CHARME mixture has no closed-form conditional density; mix the sub-model densities with the "
            "current regime probabilities");
    }
    if (const auto* setar = std::get_if<SetarSpec>(&spec.models[0])) {
        return true_conditional_density(*setar, a, y_grid);
    }
    throw std::invalid_argument("AR-GARCH conditional density needs the current volatility");
}

cde::DensityEstimate truth_density(const SubModel& model, std::span<const double> condition_points,
                                   std::span<const double> y_grid, const TruthConfig& cfg, std::uint64_t seed) {
    if (cfg.length < 2 || cfg.neighbours == 0) {
        throw std::invalid_argument("truth simulation needs a positive length and neighbour count");
    }
    const auto traj = simulate_charme(single_model(model), cfg.length + 1, cfg.burn_in, seed);
    const auto& innovation = innovation_of(model);
    const std::size_t transitions = traj.size() - 1;
    const std::size_t k = std::min(cfg.neighbours, transitions);

    cde::DensityEstimate est;
    est.method = "truth";
    est.condition_points.assign(condition_points.begin(), condition_points.end());
    est.y_grid.assign(y_grid.begin(), y_grid.end());
    est.values.assign(est.rows() * est.cols(), 0.0);

    std::vector<std::size_t> order(transitions);
    for (std::size_t l = 0; l < est.rows(); ++l) {
        const double a = condition_points[l];
        for (std::size_t t = 0; t < transitions; ++t) {
            order[t] = t;
        }
        const auto closer = [&](std::size_t i, std::size_t j) {
            return std::abs(traj.values[i] - a) < std::abs(traj.values[j] - a);
        };
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), closer);
        const double radius = std::abs(traj.values[order[k - 1]] - a);
        const double h = radius > 0.0 ? 0.5 * radius : 1.0;
        double total = 0.0;
        double* row = est.values.data() + l * est.cols();
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t t = order[i];
            const double u = (traj.values[t] - a) / h;
            const double w = std::exp(-0.5 * u * u);
            const double loc = traj.location[t + 1];
            const double sc = traj.scale[t + 1];
            for (std::size_t g = 0; g < est.cols(); ++g) {
                row[g] += w * innovation.pdf((y_grid[g] - loc) / sc) / sc;
            }
            total += w;
        }
        for (std::size_t g = 0; g < est.cols(); ++g) {
            row[g] /= total;
        }
    }
    return est;
}

EvalGrid eval_grid(std::span<const double> values, double width, std::size_t points, std::size_t conditions) {
    if (values.empty()) {
        throw std::invalid_argument("evaluation grid needs a nonempty trajectory");
    }
    if (points < 2 || conditions == 0 || !(width > 0.0)) {
        throw std::invalid_argument("evaluation grid needs width > 0, points >= 2 and conditions >= 1");
    }
    EvalGrid grid;
    grid.y_grid = cde::default_y_grid(values, points, width);
    grid.condition_points = stats::linspace(stats::quantile(values, 0.1), stats::quantile(values, 0.9), conditions);
    return grid;
}

double eval_r1(std::span<const cde::DensityEstimate> estimates, std::span<const cde::DensityEstimate> truths) {
    if (estimates.size() != truths.size()) {
        throw std::invalid_argument("estimates and truths are misaligned (" + std::to_string(estimates.size()) +
                                    " vs " + std::to_string(truths.size()) + " steps)");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        monitor::require_aligned(estimates[i], truths[i]);
        std::vector<double> per_condition(estimates[i].rows());
        for (std::size_t l = 0; l < per_condition.size(); ++l) {
            per_condition[l] = monitor::abs_dev(estimates[i].row(l), truths[i].row(l));
        }
        total += stats::median(per_condition);
    }
    return total;
}

double eval_r2(std::span<const cde::DensityEstimate> estimates, std::span<const std::vector<double>> targets) {
    if (estimates.size() != targets.size()) {
        throw std::invalid_argument("estimates and targets are misaligned (" + std::to_string(estimates.size()) +
                                    " vs " + std::to_string(targets.size()) + " steps)");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        std::vector<double> per_condition(estimates[i].rows());
        for (std::size_t l = 0; l < per_condition.size(); ++l) {
            per_condition[l] = monitor::abs_dev(estimates[i].row(l), targets[i]);
        }
        total += stats::median(per_condition);
    }
    return total;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "index,value,regime,contaminated\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << i << ',' << core::format_double(traj.values[i]) << ',' << traj.labels[i] << ','
            << (traj.contaminated[i] ? 1 : 0) << '\n';
    }
}

}  // namespace depthmon::sim
