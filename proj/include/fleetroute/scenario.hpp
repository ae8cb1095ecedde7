#ifndef FLEETROUTE_SCENARIO_HPP
#define FLEETROUTE_SCENARIO_HPP

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fleetroute/field.hpp"
#include "fleetroute/geometry.hpp"
#include "fleetroute/random.hpp"

namespace fleetroute {

struct Node {
    int id = 0;
    Vec2 position;
    double data_amount = 1.0;  // rho in (0, 1]
};

/// The mission world: sensor nodes, start/end points, circular obstacles and
/// the believed current field. Immutable after construction.
struct Scenario {
    Rect region;
    std::vector<Node> nodes;
    Vec2 start;
    Vec2 end;
    std::vector<Circle> obstacles;
    CurrentField field;
    double comm_delay_t0 = 5.0;    // seconds
    double service_coeff = 20.0;   // seconds per unit rho

    double total_value() const {
        double s = 0.0;
        for (const auto& n : nodes) s += n.data_amount;
        return s;
    }
};

struct ScenarioConfig {
    double region_size = 10000.0;  // meters, square region
    int node_count = 60;
    int vortex_count = 20;
    double gamma_mean = 0.0;
    double gamma_std = 50.0;
    double delta_mean = 80.0;
    double delta_std = 100.0;
    int obstacle_count = 10;
    double obstacle_radius_min = 100.0;
    double obstacle_radius_max = 300.0;
    double comm_delay_t0 = 5.0;
    double service_coeff = 20.0;
    std::uint64_t seed = 1;
    std::optional<Vec2> start;  // default: region corner (0, 0)
    std::optional<Vec2> end;    // default: the opposite corner
};

class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Data-collection time for one node: t0 + coeff * rho.
inline double service_time(const Node& node, const Scenario& scenario) {
    return scenario.comm_delay_t0 + scenario.service_coeff * node.data_amount;
}

/// Generates a randomized instance. Deterministic per seed: node positions
/// uniform over the region, rho uniform on (0,1], vortex strength/radius
/// normal with radius clamped to >= 1 m, obstacles rejected if they cover the
/// start, the end or any node. Start/end default to opposite region corners.
inline Scenario generate_scenario(const ScenarioConfig& config) {
    if (config.node_count < 1) throw ScenarioError("node_count must be >= 1");
    if (config.region_size <= 0) throw ScenarioError("region_size must be positive");
    if (config.vortex_count < 0) throw ScenarioError("vortex_count must be >= 0");

    Scenario s;
    s.region = {0.0, 0.0, config.region_size, config.region_size};
    s.start = config.start.value_or(Vec2{0.0, 0.0});
    s.end = config.end.value_or(Vec2{config.region_size, config.region_size});
    if (s.start == s.end) throw ScenarioError("start must differ from end");
    s.comm_delay_t0 = config.comm_delay_t0;
    s.service_coeff = config.service_coeff;

    Rng rng = make_rng(config.seed);
    std::uniform_real_distribution<double> coord(0.0, config.region_size);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    s.nodes.reserve(config.node_count);
    for (int i = 0; i < config.node_count; ++i) {
        Node n;
        n.id = i;
        n.position = {coord(rng), coord(rng)};
        n.data_amount = 1.0 - unit(rng);  // (0, 1]
        s.nodes.push_back(n);
    }

    std::normal_distribution<double> gamma(config.gamma_mean, std::max(1e-12, config.gamma_std));
    std::normal_distribution<double> delta(config.delta_mean, std::max(1e-12, config.delta_std));
    for (int i = 0; i < config.vortex_count; ++i) {
        LambVortex v;
        v.center = {coord(rng), coord(rng)};
        v.strength = config.gamma_std > 0 ? gamma(rng) : config.gamma_mean;
        v.radius = std::max(1.0, config.delta_std > 0 ? delta(rng) : config.delta_mean);
        s.field.vortexes.push_back(v);
    }

    std::uniform_real_distribution<double> radius(config.obstacle_radius_min,
                                                  config.obstacle_radius_max);
    for (int i = 0; i < config.obstacle_count; ++i) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            Circle c{{coord(rng), coord(rng)}, radius(rng)};
            bool clear = !c.contains(s.start) && !c.contains(s.end);
            for (const auto& n : s.nodes)
                if (c.contains(n.position)) { clear = false; break; }
            if (clear) {
                s.obstacles.push_back(c);
                break;
            }
        }
    }
    return s;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ScenarioError(std::string("scenario: missing field \"") + key + "\"");
    return *it;
}

inline double require_number(const nlohmann::json& j, const char* key) {
    const auto& v = require_field(j, key);
    if (!v.is_number())
        throw ScenarioError(std::string("scenario: field \"") + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["region"] = {{"xmin", s.region.xmin}, {"ymin", s.region.ymin},
                   {"xmax", s.region.xmax}, {"ymax", s.region.ymax}};
    j["start"] = {{"x", s.start.x}, {"y", s.start.y}};
    j["end"] = {{"x", s.end.x}, {"y", s.end.y}};
    j["t0"] = s.comm_delay_t0;
    j["service_coeff"] = s.service_coeff;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : s.nodes)
        j["nodes"].push_back({{"id", n.id}, {"x", n.position.x},
                              {"y", n.position.y}, {"rho", n.data_amount}});
    j["obstacles"] = nlohmann::json::array();
    for (const auto& o : s.obstacles)
        j["obstacles"].push_back({{"x", o.center.x}, {"y", o.center.y}, {"r", o.radius}});
    j["vortexes"] = nlohmann::json::array();
    for (const auto& v : s.field.vortexes)
        j["vortexes"].push_back({{"x", v.center.x}, {"y", v.center.y},
                                 {"gamma", v.strength}, {"delta", v.radius}});
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::require_field;
    using detail::require_number;
    Scenario s;
    const auto& region = require_field(j, "region");
    s.region = {require_number(region, "xmin"), require_number(region, "ymin"),
                require_number(region, "xmax"), require_number(region, "ymax")};
    const auto& start = require_field(j, "start");
    s.start = {require_number(start, "x"), require_number(start, "y")};
    const auto& end = require_field(j, "end");
    s.end = {require_number(end, "x"), require_number(end, "y")};
    s.comm_delay_t0 = require_number(j, "t0");
    s.service_coeff = require_number(j, "service_coeff");
    if (s.comm_delay_t0 < 0) throw ScenarioError("scenario: field \"t0\" must be >= 0");

    for (const auto& nj : require_field(j, "nodes")) {
        Node n;
        n.id = static_cast<int>(require_number(nj, "id"));
        n.position = {require_number(nj, "x"), require_number(nj, "y")};
        n.data_amount = require_number(nj, "rho");
        if (!(n.data_amount > 0.0 && n.data_amount <= 1.0))
            throw ScenarioError("scenario: node " + std::to_string(n.id) +
                                " field \"rho\" must lie in (0,1]");
        s.nodes.push_back(n);
    }
    if (s.nodes.empty()) throw ScenarioError("scenario: field \"nodes\" must be non-empty");
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        if (s.nodes[i].id != static_cast<int>(i))
            throw ScenarioError("scenario: node ids must be contiguous from 0");
    if (s.start == s.end) throw ScenarioError("scenario: \"start\" must differ from \"end\"");

    for (const auto& oj : require_field(j, "obstacles"))
        s.obstacles.push_back({{require_number(oj, "x"), require_number(oj, "y")},
                               require_number(oj, "r")});
    for (const auto& vj : require_field(j, "vortexes")) {
        LambVortex v;
        v.center = {require_number(vj, "x"), require_number(vj, "y")};
        v.strength = require_number(vj, "gamma");
        v.radius = require_number(vj, "delta");
        if (v.radius <= 0)
            throw ScenarioError("scenario: field \"delta\" must be positive");
        s.field.vortexes.push_back(v);
    }
    return s;
}

inline void persist_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot open for writing: " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("malformed scenario JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace fleetroute

#endif
