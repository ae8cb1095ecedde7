#include <catch2/catch_amalgamated.hpp>

#include "fleetroute/scenario.hpp"

using namespace fleetroute;

TEST_CASE("generated scenario honors the configuration") {
    ScenarioConfig cfg;
    cfg.seed = 1;
    Scenario s = generate_scenario(cfg);
    CHECK(s.nodes.size() == 60);
    CHECK(s.field.vortexes.size() == 20);
    for (const auto& n : s.nodes) {
        CHECK(s.region.contains(n.position));
        CHECK(n.data_amount > 0.0);
        CHECK(n.data_amount <= 1.0);
    }
    for (const auto& v : s.field.vortexes) {
        CHECK(s.region.contains(v.center));
        CHECK(v.radius > 0.0);
    }
    for (const auto& o : s.obstacles) {
        CHECK_FALSE(o.contains(s.start));
        CHECK_FALSE(o.contains(s.end));
        for (const auto& n : s.nodes) CHECK_FALSE(o.contains(n.position));
    }
}

TEST_CASE("degenerate one-node zero-vortex scenario") {
    ScenarioConfig cfg;
    cfg.node_count = 1;
    cfg.vortex_count = 0;
    cfg.seed = 7;
    Scenario s = generate_scenario(cfg);
    CHECK(s.nodes.size() == 1);
    CHECK(s.field.vortexes.empty());
    Vec2 v = field_velocity({500.0, 500.0}, s.field);
    CHECK(v.x == 0.0);
    CHECK(v.y == 0.0);
}

TEST_CASE("scenario generation is byte-identical per seed") {
    ScenarioConfig cfg;
    cfg.node_count = 25;
    cfg.seed = 12345;
    std::string a = scenario_to_json(generate_scenario(cfg)).dump();
    std::string b = scenario_to_json(generate_scenario(cfg)).dump();
    CHECK(a == b);
}

TEST_CASE("service time formula") {
    Scenario s;
    s.comm_delay_t0 = 5.0;
    s.service_coeff = 20.0;
    Node n;
    n.data_amount = 1.0;
    CHECK(service_time(n, s) == Catch::Approx(25.0));
    n.data_amount = 0.5;
    CHECK(service_time(n, s) == Catch::Approx(15.0));
    n.data_amount = 1e-12;
    CHECK(service_time(n, s) == Catch::Approx(5.0).margin(1e-9));
}

TEST_CASE("scenario JSON round-trips over many seeds") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        ScenarioConfig cfg;
        cfg.node_count = 8;
        cfg.vortex_count = 4;
        cfg.obstacle_count = 3;
        cfg.region_size = 3000.0;
        cfg.seed = seed;
        Scenario s = generate_scenario(cfg);
        nlohmann::json j1 = scenario_to_json(s);
        Scenario back = scenario_from_json(j1);
        nlohmann::json j2 = scenario_to_json(back);
        REQUIRE(j1 == j2);
    }
}

TEST_CASE("out-of-range rho is rejected with the node named") {
    ScenarioConfig cfg;
    cfg.node_count = 3;
    cfg.seed = 2;
    nlohmann::json j = scenario_to_json(generate_scenario(cfg));
    j["nodes"][1]["rho"] = 1.5;
    try {
        scenario_from_json(j);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("rho") != std::string::npos);
    }
}

TEST_CASE("missing end field is rejected by name") {
    ScenarioConfig cfg;
    cfg.node_count = 3;
    cfg.seed = 2;
    nlohmann::json j = scenario_to_json(generate_scenario(cfg));
    j.erase("end");
    try {
        scenario_from_json(j);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("end") != std::string::npos);
    }
}

TEST_CASE("invalid configurations throw") {
    ScenarioConfig cfg;
    cfg.node_count = 0;
    CHECK_THROWS_AS(generate_scenario(cfg), ScenarioError);
    cfg.node_count = 5;
    cfg.region_size = -1.0;
    CHECK_THROWS_AS(generate_scenario(cfg), ScenarioError);
}
