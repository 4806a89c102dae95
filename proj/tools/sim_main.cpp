// sim: experiment runner and live service
#include <mochi/io/config.hpp>
#include <mochi/service/server.hpp>
#include <mochi/sim/experiment.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace mochi;

std::filesystem::path delivery_path(const std::filesystem::path &out) {
    std::filesystem::path p = out;
    p.replace_filename(out.stem().string() + "_delivery" + out.extension().string());
    return p;
}

int run_experiment(const std::string &config_path, int seeds, std::uint64_t first_seed,
                   const std::string &out_path) {
    sim::SimConfig cfg;
    try {
        cfg = config_path.empty() ? sim::SimConfig{} : io::load_config(config_path);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    const auto seed_list = sim::seed_range(first_seed, seeds);
    const sim::SimConfig ready = sim::prepared(cfg);
    const double duration = cfg.experiment.duration;

    std::vector<sim::RunMetrics> pickup;
    for (int nb : cfg.experiment.pickup_blimps) {
        for (int nballs : cfg.experiment.pickup_balloons) {
            const auto rows = sim::run_pickup_experiment(ready, nb, nballs, seed_list, duration);
            pickup.insert(pickup.end(), rows.begin(), rows.end());
            std::cerr << "pickup " << nb << " blimps / " << nballs << " balloons done\n";
        }
    }
    std::vector<sim::RunMetrics> delivery;
    for (const auto &cell : cfg.experiment.delivery) {
        const auto rows =
            sim::run_delivery_experiment(ready, cell.n_blimps, cell.n_balloons, seed_list, duration);
        delivery.insert(delivery.end(), rows.begin(), rows.end());
        std::cerr << "delivery " << cell.n_blimps << " blimps / " << cell.n_balloons << " balloons done\n";
    }

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "cannot write " << out_path << '\n';
        return 1;
    }
    sim::write_metrics_csv(out, pickup);
    if (!cfg.experiment.delivery.empty()) {
        const auto dpath = delivery_path(out_path);
        std::ofstream dout(dpath, std::ios::binary | std::ios::trunc);
        if (!dout) {
            std::cerr << "cannot write " << dpath << '\n';
            return 1;
        }
        sim::write_metrics_csv(dout, delivery);
        std::cout << "wrote " << out_path << " and " << dpath.string() << '\n';
    } else {
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int run_serve(const std::string &config_path, service::ServeOptions opt, int blimps, int balloons,
              std::optional<std::uint64_t> seed, const std::string &scenario) {
    sim::SimConfig cfg;
    try {
        cfg = config_path.empty() ? sim::SimConfig{} : io::load_config(config_path);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (cfg.state_dir.empty()) {
        cfg.state_dir = "state";
    }
    const sim::Scenario sc = scenario == "pickup" ? sim::Scenario::Pickup : sim::Scenario::PickupAndDelivery;
    sim::World world(cfg, blimps, balloons, seed.value_or(cfg.world.seed), sc);
    boost::asio::io_context io;
    service::Server server(io, world, opt);
    server.start();
    std::cout << "listening on " << opt.address << ":" << server.port() << std::endl;
    io.run();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Blimp swarm simulator"};
    app.require_subcommand(1);

    std::string config;
    int seeds = 30;
    std::uint64_t first_seed = 1;
    std::string out = "metrics.csv";
    auto *exp = app.add_subcommand("experiment", "Run the pickup grid and the delivery scenarios");
    exp->add_option("--config", config, "Simulator config (JSON)");
    exp->add_option("--seeds", seeds, "Seeds per grid cell")->check(CLI::Range(1, 100000));
    exp->add_option("--first-seed", first_seed, "First seed");
    exp->add_option("--out", out, "Pickup metrics CSV; delivery rows go to <stem>_delivery.csv");

    service::ServeOptions sopt;
    int blimps = 4;
    int balloons = 8;
    std::optional<std::uint64_t> seed;
    std::string scenario = "delivery";
    auto *serve = app.add_subcommand("serve", "Run the world live behind a WebSocket endpoint");
    serve->add_option("--config", config, "Simulator config (JSON)");
    serve->add_option("--port", sopt.port, "TCP port, 0 picks a free one");
    serve->add_option("--address", sopt.address, "Bind address");
    serve->add_option("--speed", sopt.speed, "Simulated seconds per wall second")->check(CLI::PositiveNumber);
    serve->add_option("--duration", sopt.duration, "Stop after this many simulated seconds");
    serve->add_option("--record", sopt.record_path, "Write every snapshot to this JSONL file");
    serve->add_option("--blimps", blimps, "Number of blimps")->check(CLI::Range(0, 64));
    serve->add_option("--balloons", balloons, "Number of balloons")->check(CLI::Range(0, 64));
    serve->add_option("--seed", seed, "World seed (default: world.seed from the config)");
    serve->add_option("--scenario", scenario, "pickup or delivery")
        ->check(CLI::IsMember({"pickup", "delivery"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }
    try {
        if (*exp) {
            return run_experiment(config, seeds, first_seed, out);
        }
        return run_serve(config, sopt, blimps, balloons, seed, scenario);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
