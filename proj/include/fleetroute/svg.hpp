#ifndef FLEETROUTE_SVG_HPP
#define FLEETROUTE_SVG_HPP

#include <set>
#include <sstream>
#include <string>

#include "fleetroute/mission.hpp"
#include "fleetroute/pre_planner.hpp"

namespace fleetroute {

/// Renders a scenario, optionally overlaid with a fleet plan and a mission
/// log, as a standalone SVG document: region, obstacles, a 25x25 current
/// quiver, nodes scaled by rho, per-vehicle route polylines, red x markers on
/// discarded nodes and green rings on auctioned pickups.
inline std::string render_svg(const Scenario& scenario, const FleetPlan* plan = nullptr,
                              const MissionLog* log = nullptr) {
    const int node_count = static_cast<int>(scenario.nodes.size());
    auto check_node = [&](int id, const char* source) {
        if (id < 0 || id >= node_count)
            throw std::invalid_argument(std::string("render_svg: ") + source +
                                        " references node " + std::to_string(id) +
                                        " outside the scenario's " +
                                        std::to_string(node_count) + " nodes");
    };
    if (plan) {
        for (const auto& r : plan->routes)
            for (int idx : r.nodes) check_node(CostMatrix::node_of_index(idx), "plan");
        for (int idx : plan->idle_nodes) check_node(CostMatrix::node_of_index(idx), "plan");
    }
    if (log) {
        for (const auto& ev : log->events)
            if (ev.node >= 0) check_node(ev.node, "log");
    }

    const double view = 1000.0;
    const double pad = 20.0;
    double sx = (view - 2 * pad) / scenario.region.width();
    double sy = (view - 2 * pad) / scenario.region.height();
    auto tx = [&](double x) { return pad + (x - scenario.region.xmin) * sx; };
    auto ty = [&](double y) { return view - pad - (y - scenario.region.ymin) * sy; };

    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << view << "\" height=\"" << view
      << "\" viewBox=\"0 0 " << view << " " << view << "\">\n";
    s << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << view - 2 * pad
      << "\" height=\"" << view - 2 * pad
      << "\" fill=\"#eef6fb\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    for (const auto& o : scenario.obstacles)
        s << "<circle class=\"obstacle\" cx=\"" << tx(o.center.x) << "\" cy=\"" << ty(o.center.y)
          << "\" r=\"" << o.radius * sx << "\" fill=\"#b0b0b0\" stroke=\"#707070\"/>\n";

    // Current quiver on a 25x25 lattice; arrow length scaled to cell size.
    const int grid = 25;
    double max_speed = 1e-9;
    std::vector<Vec2> samples(grid * grid);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            Vec2 p{scenario.region.xmin + (i + 0.5) * scenario.region.width() / grid,
                   scenario.region.ymin + (j + 0.5) * scenario.region.height() / grid};
            samples[i * grid + j] = field_velocity(p, scenario.field);
            max_speed = std::max(max_speed, norm(samples[i * grid + j]));
        }
    double arrow = 0.8 * (view - 2 * pad) / grid;
    s << "<g class=\"quiver\" stroke=\"#4a7dbf\" stroke-width=\"0.8\">\n";
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            Vec2 p{scenario.region.xmin + (i + 0.5) * scenario.region.width() / grid,
                   scenario.region.ymin + (j + 0.5) * scenario.region.height() / grid};
            Vec2 v = samples[i * grid + j];
            double mag = norm(v);
            if (mag < 1e-12) continue;
            Vec2 dir = v / mag;
            double len = arrow * mag / max_speed;
            double x1 = tx(p.x), y1 = ty(p.y);
            double x2 = x1 + dir.x * len, y2 = y1 - dir.y * len;
            s << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
              << "\"/>\n";
        }
    s << "</g>\n";

    static const char* palette[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#bcbd22"};
    if (plan) {
        for (std::size_t v = 0; v < plan->routes.size(); ++v) {
            const char* color = palette[v % 8];
            s << "<polyline class=\"route\" fill=\"none\" stroke=\"" << color
              << "\" stroke-width=\"2\" points=\"";
            s << tx(scenario.start.x) << "," << ty(scenario.start.y);
            for (int idx : plan->routes[v].nodes) {
                const auto& p = scenario.nodes[CostMatrix::node_of_index(idx)].position;
                s << " " << tx(p.x) << "," << ty(p.y);
            }
            s << " " << tx(scenario.end.x) << "," << ty(scenario.end.y) << "\"/>\n";
        }
    }

    for (const auto& n : scenario.nodes) {
        double r = 2.0 + 4.0 * n.data_amount;
        s << "<circle class=\"node\" cx=\"" << tx(n.position.x) << "\" cy=\""
          << ty(n.position.y) << "\" r=\"" << r << "\" fill=\"#ffb000\" stroke=\"#a06000\"/>\n";
    }

    if (log) {
        std::set<int> discarded, picked;
        for (const auto& ev : log->events) {
            if (ev.kind == EventKind::discard) discarded.insert(ev.node);
            if (ev.kind == EventKind::award) picked.insert(ev.node);
        }
        for (int id : discarded) {
            const auto& p = scenario.nodes[id].position;
            double x = tx(p.x), y = ty(p.y), d = 6.0;
            s << "<path class=\"discard\" stroke=\"#e00000\" stroke-width=\"2.5\" d=\"M"
              << x - d << " " << y - d << " L" << x + d << " " << y + d << " M" << x - d << " "
              << y + d << " L" << x + d << " " << y - d << "\"/>\n";
        }
        for (int id : picked) {
            const auto& p = scenario.nodes[id].position;
            s << "<circle class=\"pickup\" cx=\"" << tx(p.x) << "\" cy=\"" << ty(p.y)
              << "\" r=\"9\" fill=\"none\" stroke=\"#00a000\" stroke-width=\"2.5\"/>\n";
        }
    }

    s << "<rect class=\"start\" x=\"" << tx(scenario.start.x) - 5 << "\" y=\""
      << ty(scenario.start.y) - 5 << "\" width=\"10\" height=\"10\" fill=\"#000000\"/>\n";
    s << "<rect class=\"end\" x=\"" << tx(scenario.end.x) - 5 << "\" y=\""
      << ty(scenario.end.y) - 5
      << "\" width=\"10\" height=\"10\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace fleetroute

#endif
