#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "fleetroute/io.hpp"
#include "fleetroute/svg.hpp"
#include "test_support.hpp"

using namespace fleetroute;

namespace {

Scenario small_scenario(std::uint64_t seed = 1) {
    ScenarioConfig cfg;
    cfg.node_count = 8;
    cfg.vortex_count = 3;
    cfg.obstacle_count = 2;
    cfg.region_size = 3000.0;
    cfg.seed = seed;
    return generate_scenario(cfg);
}

}  // namespace

TEST_CASE("plan JSON round-trips") {
    Scenario s = small_scenario();
    PreplanParams pp;
    FleetPlan plan = preplan_fleet(s, 5000.0, pp, 3);
    nlohmann::json j = plan_to_json(plan);
    FleetPlan back = plan_from_json(j);
    CHECK(back.vehicle_count == plan.vehicle_count);
    CHECK(back.t_max == plan.t_max);
    REQUIRE(back.routes.size() == plan.routes.size());
    for (std::size_t i = 0; i < plan.routes.size(); ++i) {
        CHECK(back.routes[i].nodes == plan.routes[i].nodes);
        CHECK(back.routes[i].expected_time == plan.routes[i].expected_time);
    }
    CHECK(back.idle_nodes == plan.idle_nodes);
}

TEST_CASE("malformed plan JSON raises IoError") {
    nlohmann::json j = {{"vehicle_count", 1}};  // routes missing
    CHECK_THROWS_AS(plan_from_json(j), IoError);
}

TEST_CASE("mission log JSONL round-trips") {
    Scenario s = small_scenario(2);
    PreplanParams pp;
    FleetPlan plan = preplan_fleet(s, 4000.0, pp, 5);
    MissionLog log = simulate_mission(plan, s, s.field, NoiseModel{}, SimOptions{}, 7);
    std::stringstream buf;
    write_mission_log(log, buf);
    MissionLog back = read_mission_log(buf);
    CHECK(back.seed == log.seed);
    CHECK(back.coordination == log.coordination);
    CHECK(back.theta == log.theta);
    CHECK(back.collected_value == log.collected_value);
    REQUIRE(back.events.size() == log.events.size());
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        CHECK(back.events[i].t == log.events[i].t);
        CHECK(back.events[i].kind == log.events[i].kind);
        CHECK(back.events[i].node == log.events[i].node);
        CHECK(back.events[i].value == log.events[i].value);
    }
    auto [theta, j] = completion_metrics(back, s);
    CHECK(theta == log.theta);
    CHECK(j == log.collected_value);
}

TEST_CASE("mission log without a meta record is rejected") {
    std::stringstream buf;
    buf << R"({"t":0,"vehicle":0,"kind":"depart","node":-1,"value":0})" << "\n";
    CHECK_THROWS_AS(read_mission_log(buf), IoError);
}

TEST_CASE("metrics CSV has the documented shape") {
    Scenario s = small_scenario(3);
    PreplanParams pp;
    FleetPlan plan = preplan_fleet(s, 4000.0, pp, 9);
    MonteCarloParams mc;
    mc.runs = 5;
    MetricsTable table = monte_carlo(s, plan, mc, 13);
    std::stringstream buf;
    write_metrics_csv(table, buf, 13, "cafe");
    std::string line;
    std::getline(buf, line);
    CHECK(line.rfind("#", 0) == 0);
    std::getline(buf, line);
    CHECK(line == "run,seed,M,theta,J,discards,pickups,runtime_s");
    int rows = 0;
    while (std::getline(buf, line)) {
        if (line.rfind("#", 0) == 0) continue;
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(rows == 5);
}

TEST_CASE("metrics CSV is byte-identical per seed") {
    Scenario s = small_scenario(4);
    PreplanParams pp;
    FleetPlan plan = preplan_fleet(s, 4000.0, pp, 9);
    MonteCarloParams mc;
    mc.runs = 4;
    std::stringstream a, b;
    write_metrics_csv(monte_carlo(s, plan, mc, 21), a, 21, "h");
    write_metrics_csv(monte_carlo(s, plan, mc, 21), b, 21, "h");
    CHECK(a.str() == b.str());
}

TEST_CASE("scenario-only SVG is well-formed with nodes and a quiver") {
    Scenario s = small_scenario(5);
    std::string svg = render_svg(s);
    CHECK(test_support::xml_well_formed(svg));
    CHECK(test_support::count_occurrences(svg, "class=\"node\"") == 8);
    CHECK(test_support::count_occurrences(svg, "class=\"quiver\"") == 1);
    CHECK(test_support::count_occurrences(svg, "class=\"route\"") == 0);
    CHECK(test_support::count_occurrences(svg, "class=\"obstacle\"") ==
          static_cast<int>(s.obstacles.size()));
}

TEST_CASE("plan SVG draws one polyline per route") {
    Scenario s = small_scenario(6);
    CostMatrix m = build_cost_matrix(s);
    FleetPlan plan;
    plan.vehicle_count = 3;
    plan.t_max = 4000.0;
    plan.routes.push_back(make_route(0, {1, 2}, m));
    plan.routes.push_back(make_route(1, {3, 4}, m));
    plan.routes.push_back(make_route(2, {5}, m));
    std::string svg = render_svg(s, &plan);
    CHECK(test_support::xml_well_formed(svg));
    CHECK(test_support::count_occurrences(svg, "class=\"route\"") == 3);
}

TEST_CASE("log SVG marks discards and pickups") {
    Scenario s = small_scenario(7);
    MissionLog log;
    log.closed = true;
    log.events.push_back({120.0, 0, EventKind::discard, 2, 0.0});
    log.events.push_back({300.0, 1, EventKind::award, 5, 0.4});
    std::string svg = render_svg(s, nullptr, &log);
    CHECK(test_support::xml_well_formed(svg));
    CHECK(test_support::count_occurrences(svg, "class=\"discard\"") == 1);
    CHECK(test_support::count_occurrences(svg, "class=\"pickup\"") == 1);
}

TEST_CASE("SVG rejects references to unknown nodes") {
    Scenario s = small_scenario(8);
    MissionLog log;
    log.closed = true;
    log.events.push_back({1.0, 0, EventKind::discard, 99, 0.0});
    try {
        render_svg(s, nullptr, &log);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
}
