#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "cli.hpp"
#include "depthmon/csv.hpp"
#include "depthmon/stats.hpp"

namespace depthmon::cli {
namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto rng = make_substream(seed, (a << 32) ^ b);
    return rng();
}

enum SeedRole : std::uint64_t { kPilot = 1, kTruth = 2, kStream = 3, kContamination = 4 };

struct ScenarioSetup {
    sim::CharmeSpec spec;
    double share = 0.0;
    double contamination = 0.0;
    double pilot_sd = 0.0;
    cde::CdeConfig cde;
    cde::DensityEstimate truth;
};

}  // namespace

std::vector<Replication> run_replications(const EvaluateConfig& cfg, std::size_t jobs) {
    cfg.validate();
    jobs = std::max<std::size_t>(jobs, 1);

    // Pilot grid and truth depend only on the share; contamination levels reuse them.
    std::vector<ScenarioSetup> setups;
    for (std::size_t si = 0; si < cfg.shares.size(); ++si) {
        ScenarioSetup base;
        base.share = cfg.shares[si];
        base.spec.models = cfg.models;
        base.spec.transition = sim::two_state_transition(base.share, cfg.switch_rate);
        base.spec.initial_label = 2;
        const auto pilot = sim::simulate_charme(base.spec, cfg.pilot_length, cfg.burn_in, derive_seed(cfg.seed, kPilot, si));
        const auto grid = sim::eval_grid(pilot.values, cfg.grid_width, cfg.grid_points, cfg.grid_conditions);
        base.pilot_sd = stats::sd(pilot.values);
        base.cde = cfg.cde;
        base.cde.y_grid = grid.y_grid;
        base.cde.condition_points = grid.condition_points;
        base.truth = sim::truth_density(cfg.models[1], grid.condition_points, grid.y_grid, cfg.truth,
                                        derive_seed(cfg.seed, kTruth, si));
        for (double c : cfg.contamination) {
            auto setup = base;
            setup.contamination = c;
            setups.push_back(std::move(setup));
        }
    }

    const std::size_t tasks = setups.size() * cfg.reps;
    const std::size_t per_task = cfg.estimators.size();
    std::vector<Replication> results(tasks * per_task);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t task = next++; task < tasks; task = next++) {
            try {
                const std::size_t s = task / cfg.reps;
                const std::size_t r = task % cfg.reps;
                const auto& setup = setups[s];
                const auto clean = sim::simulate_charme(setup.spec, cfg.n, cfg.burn_in, derive_seed(cfg.seed, kStream, task));
                sim::ContaminationSpec ao;
                ao.fraction = setup.contamination;
                ao.location = cfg.ao_location * setup.pilot_sd;
                ao.scale = cfg.ao_scale * setup.pilot_sd;
                const auto observed = sim::contaminate(clean, ao, derive_seed(cfg.seed, kContamination, task));
                for (std::size_t e = 0; e < per_task; ++e) {
                    const auto start = std::chrono::steady_clock::now();
                    const auto est = cde::estimate(cfg.estimators[e], observed.values, setup.cde);
                    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    Replication& out = results[task * per_task + e];
                    out.scenario = s;
                    out.share = setup.share;
                    out.contamination = setup.contamination;
                    out.rep = r;
                    out.estimator = cfg.estimators[e];
                    out.distance = sim::eval_r1({&est, 1}, {&setup.truth, 1});
                    out.seconds = seconds;
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = tasks;
            }
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

std::vector<EvaluateRow> summarize(const std::vector<Replication>& reps) {
    std::map<std::pair<std::size_t, int>, std::vector<const Replication*>> groups;
    for (const auto& r : reps) {
        groups[{r.scenario, static_cast<int>(r.estimator)}].push_back(&r);
    }
    std::vector<EvaluateRow> rows;
    for (const auto& [key, members] : groups) {
        EvaluateRow row;
        row.scenario = key.first;
        row.share = members.front()->share;
        row.contamination = members.front()->contamination;
        row.estimator = members.front()->estimator;
        row.reps = members.size();
        std::vector<double> d;
        double seconds = 0.0;
        for (const auto* m : members) {
            d.push_back(m->distance);
            seconds += m->seconds;
        }
        row.mean_distance = stats::mean(d);
        row.sd_distance = d.size() > 1 ? stats::sd(d) : 0.0;
        row.mean_seconds = seconds / static_cast<double>(members.size());
        rows.push_back(row);
    }
    return rows;
}

void write_evaluate_csv(std::ostream& out, const std::vector<EvaluateRow>& rows) {
    out << "scenario,share,contamination,estimator,reps,mean_dH,sd_dH,mean_seconds\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << core::format_double(r.share) << ',' << core::format_double(r.contamination) << ','
            << cde::to_string(r.estimator) << ',' << r.reps << ',' << core::format_double(r.mean_distance) << ','
            << core::format_double(r.sd_distance) << ',' << core::format_double(r.mean_seconds) << '\n';
    }
}

void write_replications_csv(std::ostream& out, const std::vector<Replication>& reps) {
    out << "scenario,share,contamination,rep,estimator,dH,seconds\n";
    for (const auto& r : reps) {
        out << r.scenario << ',' << core::format_double(r.share) << ',' << core::format_double(r.contamination) << ','
            << r.rep << ',' << cde::to_string(r.estimator) << ',' << core::format_double(r.distance) << ','
            << core::format_double(r.seconds) << '\n';
    }
}

}  // namespace depthmon::cli
