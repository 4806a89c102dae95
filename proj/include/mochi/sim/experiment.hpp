// Seeded pickup and pickup-and-delivery runs, metrics CSV
#pragma once

#include <mochi/sim/world.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace mochi::sim {

struct RunMetrics {
    std::uint64_t seed = 0;
    int n_blimps = 0;
    int n_balloons = 0;
    int attempts = 0;
    int successes = 0;
    int deliveries = 0;
    bool operator==(const RunMetrics &) const = default;
};

inline constexpr const char *kMetricsHeader = "seed,n_blimps,n_balloons,attempts,successes,deliveries";

inline void check_counts(Scenario scenario, int n_blimps, int n_balloons) {
    const int max_blimps = scenario == Scenario::Pickup ? 4 : 8;
    const int max_balloons = scenario == Scenario::Pickup ? 8 : 12;
    if (n_blimps < 1 || n_blimps > max_blimps) {
        throw ConfigError("n_blimps out of range: " + std::to_string(n_blimps));
    }
    if (n_balloons < 0 || n_balloons > max_balloons) {
        throw ConfigError("n_balloons out of range: " + std::to_string(n_balloons));
    }
}

/// Resolves default color families once so repeated runs skip the calibration.
inline SimConfig prepared(SimConfig cfg) {
    if (!cfg.balloon_family) {
        cfg.balloon_family = default_balloon_family(cfg.world);
    }
    if (!cfg.goal_family) {
        cfg.goal_family = default_goal_family(cfg.world);
    }
    return cfg;
}

inline RunMetrics run_scenario(const SimConfig &cfg, Scenario scenario, int n_blimps, int n_balloons,
                               std::uint64_t seed, double duration) {
    check_counts(scenario, n_blimps, n_balloons);
    World world(cfg, n_blimps, n_balloons, seed, scenario);
    world.run_for(duration);
    return {seed, n_blimps, n_balloons, world.attempts(), world.successes(), world.deliveries()};
}

inline std::vector<RunMetrics> run_pickup_experiment(const SimConfig &cfg, int n_blimps, int n_balloons,
                                                     const std::vector<std::uint64_t> &seeds,
                                                     double duration = 300.0) {
    check_counts(Scenario::Pickup, n_blimps, n_balloons);
    const SimConfig ready = prepared(cfg);
    std::vector<RunMetrics> rows;
    for (std::uint64_t s : seeds) {
        rows.push_back(run_scenario(ready, Scenario::Pickup, n_blimps, n_balloons, s, duration));
    }
    return rows;
}

inline std::vector<RunMetrics> run_delivery_experiment(const SimConfig &cfg, int n_blimps, int n_balloons,
                                                       const std::vector<std::uint64_t> &seeds,
                                                       double duration = 300.0) {
    check_counts(Scenario::PickupAndDelivery, n_blimps, n_balloons);
    const SimConfig ready = prepared(cfg);
    std::vector<RunMetrics> rows;
    for (std::uint64_t s : seeds) {
        rows.push_back(run_scenario(ready, Scenario::PickupAndDelivery, n_blimps, n_balloons, s, duration));
    }
    return rows;
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
    std::vector<std::uint64_t> s;
    for (int i = 0; i < count; ++i) {
        s.push_back(first + static_cast<std::uint64_t>(i));
    }
    return s;
}

inline void write_metrics_csv(std::ostream &out, const std::vector<RunMetrics> &rows) {
    out << kMetricsHeader << '\n';
    for (const RunMetrics &r : rows) {
        out << r.seed << ',' << r.n_blimps << ',' << r.n_balloons << ',' << r.attempts << ','
            << r.successes << ',' << r.deliveries << '\n';
    }
}

} // namespace mochi::sim
