// fleetroute: mission planning and stochastic simulation for an AUV fleet
// collecting data from fixed nodes under a hard per-vehicle time budget.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fleetroute/io.hpp"
#include "fleetroute/route_optimizer.hpp"
#include "fleetroute/svg.hpp"

namespace {

std::string hash_config(const std::vector<std::string>& args) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (const auto& a : args)
        for (char c : a) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fleetroute;
    CLI::App app{"fleetroute: multi-vehicle node-access mission planner and simulator"};
    app.require_subcommand(1);

    std::string scenario_path, plan_path, log_path, out_path;
    std::uint64_t seed = 1;
    double t_max = 18000.0;  // 5 h endurance
    double speed = 1.0;      // m/s
    std::string coordination = "on";
    int runs = 50;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random scenario");
    ScenarioConfig cfg;
    gen->add_option("--nodes", cfg.node_count, "sensor node count")->capture_default_str();
    gen->add_option("--vortexes", cfg.vortex_count, "vortex count")->capture_default_str();
    gen->add_option("--region", cfg.region_size, "region side length, m")->capture_default_str();
    gen->add_option("--obstacles", cfg.obstacle_count, "obstacle count")->capture_default_str();
    gen->add_option("--gamma-mean", cfg.gamma_mean, "vortex strength mean");
    gen->add_option("--gamma-std", cfg.gamma_std, "vortex strength std");
    gen->add_option("--delta-mean", cfg.delta_mean, "vortex radius mean, m");
    gen->add_option("--delta-std", cfg.delta_std, "vortex radius std, m");
    gen->add_option("--seed", seed, "random seed")->capture_default_str();
    gen->add_option("--out", out_path, "output scenario JSON")->required();

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "pre-departure fleet planning");
    plan_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    plan_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    plan_cmd->add_option("--tmax", t_max, "per-vehicle time budget, s")->capture_default_str();
    plan_cmd->add_option("--speed", speed, "propulsion speed, m/s")->capture_default_str();
    plan_cmd->add_option("--out", out_path, "output plan JSON")->required();
    bool use_kmeans = false;
    int kmeans_m = 0;
    plan_cmd->add_flag("--kmeans", use_kmeans, "use the k-means allocation baseline");
    plan_cmd->add_option("--fleet-size", kmeans_m, "vehicle count for --kmeans (0 = estimate)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "execute one mission");
    sim_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--plan", plan_path, "plan JSON (defaults to planning in-process)");
    sim_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    sim_cmd->add_option("--tmax", t_max, "per-vehicle time budget, s")->capture_default_str();
    sim_cmd->add_option("--speed", speed, "propulsion speed, m/s")->capture_default_str();
    sim_cmd->add_option("--coordination", coordination, "on|off")->capture_default_str();
    sim_cmd->add_option("--out", out_path, "output mission log JSONL")->required();

    // montecarlo
    auto* mc_cmd = app.add_subcommand("montecarlo", "Monte-Carlo mission study");
    mc_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    mc_cmd->add_option("--plan", plan_path, "plan JSON (defaults to planning in-process)");
    mc_cmd->add_option("--runs", runs, "number of runs")->capture_default_str();
    mc_cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    mc_cmd->add_option("--tmax", t_max, "per-vehicle time budget, s")->capture_default_str();
    mc_cmd->add_option("--speed", speed, "propulsion speed, m/s")->capture_default_str();
    mc_cmd->add_option("--coordination", coordination, "on|off")->capture_default_str();
    mc_cmd->add_option("--out", out_path, "output metrics CSV")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "render scenario/plan/log to SVG");
    render_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    render_cmd->add_option("--plan", plan_path, "plan JSON (optional)");
    render_cmd->add_option("--log", log_path, "mission log JSONL (optional)");
    render_cmd->add_option("--out", out_path, "output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    std::vector<std::string> raw_args(argv + 1, argv + argc);
    const std::string config_hash = hash_config(raw_args);

    try {
        if (gen->parsed()) {
            cfg.seed = seed;
            Scenario s = generate_scenario(cfg);
            nlohmann::json j = scenario_to_json(s);
            j["_meta"] = {{"tool_version", kToolVersion}, {"seed", seed},
                          {"config_hash", config_hash}};
            std::ofstream out(out_path);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            out << j.dump(2) << "\n";
            return 0;
        }

        Scenario scenario = load_scenario(scenario_path);
        PreplanParams pp;
        pp.prop_speed = speed;

        if (plan_cmd->parsed()) {
            FleetPlan plan;
            if (use_kmeans) {
                int m = kmeans_m;
                if (m <= 0) {
                    FleetPlan sizing = preplan_fleet(scenario, t_max, pp, seed);
                    m = sizing.vehicle_count;
                }
                plan = preplan_fleet_kmeans(scenario, t_max, m, pp, seed);
            } else {
                plan = preplan_fleet(scenario, t_max, pp, seed);
            }
            save_plan(plan, out_path, seed, config_hash);
            return 0;
        }

        auto obtain_plan = [&]() {
            return plan_path.empty() ? preplan_fleet(scenario, t_max, pp, seed)
                                     : load_plan(plan_path);
        };

        if (sim_cmd->parsed()) {
            FleetPlan plan = obtain_plan();
            SimOptions opts;
            opts.coordination = coordination != "off";
            NoiseModel noise;
            FieldPerturbation pert;
            CurrentField true_field =
                realize_true_field(scenario.field, pert, derive_seed(seed, 1));
            MissionLog log = simulate_mission(plan, scenario, true_field, noise, opts,
                                              derive_seed(seed, 2));
            std::ofstream out(out_path);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            write_mission_log(log, out);
            return 0;
        }

        if (mc_cmd->parsed()) {
            FleetPlan plan = obtain_plan();
            MonteCarloParams mc;
            mc.runs = runs;
            mc.t_max = t_max;
            mc.sim.coordination = coordination != "off";
            mc.threads = env_thread_cap();
            MetricsTable table = monte_carlo(scenario, plan, mc, seed);
            std::ofstream out(out_path);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            write_metrics_csv(table, out, seed, config_hash);
            return 0;
        }

        if (render_cmd->parsed()) {
            FleetPlan plan;
            MissionLog log;
            bool have_plan = !plan_path.empty();
            bool have_log = !log_path.empty();
            if (have_plan) plan = load_plan(plan_path);
            if (have_log) {
                std::ifstream in(log_path);
                if (!in) throw IoError("cannot open mission log: " + log_path);
                log = read_mission_log(in);
            }
            std::string svg = render_svg(scenario, have_plan ? &plan : nullptr,
                                         have_log ? &log : nullptr);
            std::ofstream out(out_path);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            out << "<!-- fleetroute " << kToolVersion << " seed=" << seed
                << " config=" << config_hash << " -->\n";
            out << svg;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "fleetroute: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
