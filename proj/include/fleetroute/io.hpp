#ifndef FLEETROUTE_IO_HPP
#define FLEETROUTE_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fleetroute/mission.hpp"
#include "fleetroute/pre_planner.hpp"

namespace fleetroute {

inline constexpr const char* kToolVersion = "0.1.0";

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Fleet plans are exchanged as JSON keyed by node ids (not graph indices).
inline nlohmann::json plan_to_json(const FleetPlan& plan) {
    nlohmann::json j;
    j["vehicle_count"] = plan.vehicle_count;
    j["t_max"] = plan.t_max;
    j["routes"] = nlohmann::json::array();
    for (const auto& r : plan.routes) {
        nlohmann::json rj;
        rj["vehicle"] = r.vehicle_id;
        rj["nodes"] = nlohmann::json::array();
        for (int idx : r.nodes) rj["nodes"].push_back(CostMatrix::node_of_index(idx));
        rj["expected_time"] = r.expected_time;
        rj["expected_value"] = r.expected_value;
        j["routes"].push_back(std::move(rj));
    }
    j["idle_nodes"] = nlohmann::json::array();
    for (int idx : plan.idle_nodes) j["idle_nodes"].push_back(CostMatrix::node_of_index(idx));
    return j;
}

inline FleetPlan plan_from_json(const nlohmann::json& j) {
    FleetPlan plan;
    try {
        plan.vehicle_count = j.at("vehicle_count").get<int>();
        plan.t_max = j.at("t_max").get<double>();
        for (const auto& rj : j.at("routes")) {
            Route r;
            r.vehicle_id = rj.at("vehicle").get<int>();
            for (const auto& id : rj.at("nodes"))
                r.nodes.push_back(CostMatrix::index_of_node(id.get<int>()));
            r.expected_time = rj.at("expected_time").get<double>();
            r.expected_value = rj.at("expected_value").get<double>();
            plan.routes.push_back(std::move(r));
        }
        for (const auto& id : j.at("idle_nodes"))
            plan.idle_nodes.push_back(CostMatrix::index_of_node(id.get<int>()));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed plan JSON: ") + e.what());
    }
    return plan;
}

inline void save_plan(const FleetPlan& plan, const std::string& path, std::uint64_t seed,
                      const std::string& config_hash) {
    nlohmann::json j = plan_to_json(plan);
    j["_meta"] = {{"tool_version", kToolVersion}, {"seed", seed}, {"config_hash", config_hash}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

inline FleetPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plan file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed plan JSON: ") + e.what());
    }
    return plan_from_json(j);
}

/// Mission logs are JSONL: a meta record, then one event per line.
inline void write_mission_log(const MissionLog& log, std::ostream& out) {
    nlohmann::json meta = {{"type", "meta"},
                           {"tool_version", kToolVersion},
                           {"seed", log.seed},
                           {"coordination", log.coordination},
                           {"theta", log.theta},
                           {"J", log.collected_value},
                           {"discards", log.discards},
                           {"pickups", log.pickups},
                           {"strands", log.strands}};
    out << meta.dump() << "\n";
    for (const auto& ev : log.events) {
        nlohmann::json ej = {{"t", ev.t},
                             {"vehicle", ev.vehicle},
                             {"kind", event_kind_name(ev.kind)},
                             {"node", ev.node},
                             {"value", ev.value}};
        out << ej.dump() << "\n";
    }
}

inline MissionLog read_mission_log(std::istream& in) {
    MissionLog log;
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string("malformed mission log line: ") + e.what());
        }
        if (j.value("type", "") == "meta") {
            log.seed = j.at("seed").get<std::uint64_t>();
            log.coordination = j.at("coordination").get<bool>();
            log.theta = j.at("theta").get<double>();
            log.collected_value = j.at("J").get<double>();
            log.discards = j.at("discards").get<int>();
            log.pickups = j.at("pickups").get<int>();
            log.strands = j.at("strands").get<int>();
            have_meta = true;
            continue;
        }
        MissionEvent ev;
        ev.t = j.at("t").get<double>();
        ev.vehicle = j.at("vehicle").get<int>();
        ev.node = j.at("node").get<int>();
        ev.value = j.at("value").get<double>();
        std::string kind = j.at("kind").get<std::string>();
        bool matched = false;
        for (EventKind k : {EventKind::depart, EventKind::arrive, EventKind::collect,
                            EventKind::discard, EventKind::bid, EventKind::award,
                            EventKind::finish, EventKind::strand}) {
            if (kind == event_kind_name(k)) {
                ev.kind = k;
                matched = true;
                break;
            }
        }
        if (!matched) throw IoError("mission log: unknown event kind \"" + kind + "\"");
        log.events.push_back(ev);
    }
    if (!have_meta) throw IoError("mission log: missing meta record");
    log.closed = true;
    return log;
}

/// CSV per the schema run,seed,M,theta,J,discards,pickups,runtime_s, preceded
/// by '#' metadata/summary comment lines.
inline void write_metrics_csv(const MetricsTable& table, std::ostream& out, std::uint64_t seed,
                              const std::string& config_hash) {
    out << "# fleetroute " << kToolVersion << " seed=" << seed << " config=" << config_hash
        << "\n";
    out << "run,seed,M,theta,J,discards,pickups,runtime_s\n";
    std::ostringstream row;
    row.setf(std::ios::fixed);
    for (const auto& r : table.rows) {
        row.str("");
        row.precision(6);
        row << r.run << "," << r.seed << "," << r.vehicle_count << "," << r.theta << ","
            << r.collected_value << "," << r.discards << "," << r.pickups << ",";
        row.precision(1);
        row << r.runtime_s;
        out << row.str() << "\n";
    }
    out.setf(std::ios::fixed);
    out.precision(6);
    out << "# theta mean=" << table.theta_mean << " std=" << table.theta_std
        << " min=" << table.theta_min << " max=" << table.theta_max
        << " J_mean=" << table.value_mean << " strands=" << table.total_strands << "\n";
}

}  // namespace fleetroute

#endif
