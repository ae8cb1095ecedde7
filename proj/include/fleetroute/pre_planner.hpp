#ifndef FLEETROUTE_PRE_PLANNER_HPP
#define FLEETROUTE_PRE_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fleetroute/route.hpp"

namespace fleetroute {

/// Result of cutting the giant route into M balanced sub-routes.
/// cut_points[i] = q means the GR is cut after its q-th node (1-based over
/// the GR's node sequence, endpoints excluded).
struct Segmentation {
    std::vector<int> cut_points;
    std::vector<std::vector<int>> segments;  // graph indices, GR order preserved
    std::vector<double> segment_times;
    double objective = 0.0;
};

struct FleetPlan {
    int vehicle_count = 0;
    double t_max = 0.0;
    std::vector<Route> routes;
    std::vector<int> idle_nodes;  // graph indices on no route

    double planned_value() const {
        double v = 0.0;
        for (const auto& r : routes) v += r.expected_value;
        return v;
    }
};

/// Additional time spent outside the GR's interior: the start-to-first-node
/// and last-node-to-end transits.
inline double estimate_overhead(const GiantRoute& gr, const CostMatrix& m) {
    if (gr.order.size() < 3) return 0.0;
    int first = gr.order[1];
    int last = gr.order[gr.order.size() - 2];
    return m.transit(m.start_index(), first) + m.transit(last, m.end_index());
}

/// M = ceil((T0 - overhead) / (Tmax - overhead)), clamped to >= 1.
inline int estimate_fleet_size(double t0, double overhead, double t_max) {
    if (t0 <= 0) throw std::invalid_argument("estimate_fleet_size: T0 must be positive");
    if (t_max <= overhead)
        throw std::invalid_argument(
            "estimate_fleet_size: Tmax must exceed the start/end overhead");
    double ratio = (t0 - overhead) / (t_max - overhead);
    int m = static_cast<int>(std::ceil(ratio - 1e-9));
    return std::max(1, m);
}

enum class BalanceObjective { absolute, squared };

/// Finds cut points minimizing the sum of deviations of per-segment times
/// from their mean, by exhaustive enumeration over cut sets (exact).
/// With include_overhead each segment's time covers its start and end legs.
inline Segmentation segment_giant_route(const GiantRoute& gr, int vehicle_count,
                                        const CostMatrix& m,
                                        bool include_overhead = true,
                                        BalanceObjective objective = BalanceObjective::absolute) {
    std::vector<int> seq(gr.order.begin() + 1, gr.order.end() - 1);
    const int n = static_cast<int>(seq.size());
    if (vehicle_count < 1 || vehicle_count > n)
        throw std::invalid_argument("segment_giant_route: M must lie in [1, node count]");

    // Prefix sums over internal arc costs; segment (i..j) time is O(1).
    std::vector<double> prefix(n, 0.0);
    for (int t = 1; t < n; ++t) prefix[t] = prefix[t - 1] + m.cost(seq[t - 1], seq[t]);
    auto segment_time = [&](int i, int j) {  // inclusive node range
        double t = prefix[j] - prefix[i];
        t += m.service(seq[i]);
        if (include_overhead) {
            t += m.transit(m.start_index(), seq[i]);
            t += m.transit(seq[j], m.end_index());
        }
        return t;
    };

    const int cuts = vehicle_count - 1;
    std::vector<int> current(cuts), best_cuts;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<double> times(vehicle_count);

    auto score = [&](const std::vector<int>& cut) {
        int from = 0;
        for (int s = 0; s < vehicle_count; ++s) {
            int to = (s < cuts) ? cut[s] - 1 : n - 1;
            times[s] = segment_time(from, to);
            from = to + 1;
        }
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= vehicle_count;
        double obj = 0.0;
        for (double t : times) {
            double d = t - mean;
            obj += objective == BalanceObjective::absolute ? std::fabs(d) : d * d;
        }
        return obj;
    };

    // Enumerate 1 <= c_1 < c_2 < ... < c_{M-1} <= n-1.
    auto recurse = [&](auto&& self, int level, int min_cut) -> void {
        if (level == cuts) {
            double obj = score(current);
            if (obj < best_obj - 1e-15) {
                best_obj = obj;
                best_cuts = current;
            }
            return;
        }
        for (int c = min_cut; c <= n - (cuts - level); ++c) {
            current[level] = c;
            self(self, level + 1, c + 1);
        }
    };
    if (cuts == 0) {
        best_obj = score(current);
        best_cuts = current;
    } else {
        recurse(recurse, 0, 1);
    }

    Segmentation seg;
    seg.cut_points = best_cuts;
    seg.objective = best_obj;
    int from = 0;
    for (int s = 0; s < vehicle_count; ++s) {
        int to = (s < cuts) ? best_cuts[s] - 1 : n - 1;
        seg.segments.emplace_back(seq.begin() + from, seq.begin() + to + 1);
        seg.segment_times.push_back(segment_time(from, to));
        from = to + 1;
    }
    return seg;
}

/// Lloyd's k-means over node positions with k-means++ seeding; the comparison
/// baseline for task allocation. Each cluster becomes one vehicle's node set,
/// kept in node-id order (route ordering is deferred to the route optimizer).
inline FleetPlan kmeans_allocation(const Scenario& scenario, int vehicle_count,
                                   std::uint64_t seed) {
    if (vehicle_count < 1) throw std::invalid_argument("kmeans_allocation: M must be >= 1");
    const int n = static_cast<int>(scenario.nodes.size());
    const int k = std::min(vehicle_count, n);
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding.
    std::vector<Vec2> centers;
    centers.push_back(scenario.nodes[static_cast<int>(unit(rng) * n) % n].position);
    while (static_cast<int>(centers.size()) < k) {
        std::vector<double> d2(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers)
                best = std::min(best, norm2(scenario.nodes[i].position - c));
            d2[i] = best;
            total += best;
        }
        double target = unit(rng) * total;
        int chosen = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) { chosen = i; break; }
        }
        centers.push_back(scenario.nodes[chosen].position);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = norm2(scenario.nodes[i].position - centers[c]);
                if (d < best_d) { best_d = d; best = c; }
            }
            if (assign[i] != best) { assign[i] = best; changed = true; }
        }
        for (int c = 0; c < k; ++c) {
            Vec2 sum{0.0, 0.0};
            int count = 0;
            for (int i = 0; i < n; ++i)
                if (assign[i] == c) { sum = sum + scenario.nodes[i].position; ++count; }
            if (count > 0) centers[c] = sum / count;
        }
        if (!changed) break;
    }

    CostMatrix m = build_cost_matrix(scenario);
    FleetPlan plan;
    plan.vehicle_count = vehicle_count;
    for (int c = 0; c < vehicle_count; ++c) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (c < k && assign[i] == c) members.push_back(CostMatrix::index_of_node(scenario.nodes[i].id));
        plan.routes.push_back(make_route(c, std::move(members), m));
    }
    return plan;
}

}  // namespace fleetroute

#endif
