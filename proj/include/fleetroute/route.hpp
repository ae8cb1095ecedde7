#ifndef FLEETROUTE_ROUTE_HPP
#define FLEETROUTE_ROUTE_HPP

#include <vector>

#include "fleetroute/giant_route.hpp"

namespace fleetroute {

/// One vehicle's planned route. `nodes` holds graph indices (1..n-2); the
/// start and end points are implicit.
struct Route {
    int vehicle_id = 0;
    std::vector<int> nodes;
    double expected_time = 0.0;   // nominal transit + service, start to end
    double expected_value = 0.0;  // sum of rho over included nodes
};

inline double route_expected_time(const std::vector<int>& nodes, const CostMatrix& m) {
    double t = 0.0;
    int prev = m.start_index();
    for (int idx : nodes) {
        t += m.transit(prev, idx) + m.service(idx);
        prev = idx;
    }
    t += m.transit(prev, m.end_index());
    return t;
}

inline double route_value(const std::vector<int>& nodes, const CostMatrix& m) {
    double v = 0.0;
    for (int idx : nodes) v += m.rho(idx);
    return v;
}

inline Route make_route(int vehicle_id, std::vector<int> nodes, const CostMatrix& m) {
    Route r;
    r.vehicle_id = vehicle_id;
    r.nodes = std::move(nodes);
    r.expected_time = route_expected_time(r.nodes, m);
    r.expected_value = route_value(r.nodes, m);
    return r;
}

}  // namespace fleetroute

#endif
