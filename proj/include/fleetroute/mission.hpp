#ifndef FLEETROUTE_MISSION_HPP
#define FLEETROUTE_MISSION_HPP

#include <cstdlib>
#include <deque>
#include <queue>
#include <set>
#include <thread>
#include <vector>

#include "fleetroute/coordination.hpp"
#include "fleetroute/route_optimizer.hpp"
#include "fleetroute/transit.hpp"

namespace fleetroute {

enum class EventKind { depart, arrive, collect, discard, bid, award, finish, strand };

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::depart: return "depart";
        case EventKind::arrive: return "arrive";
        case EventKind::collect: return "collect";
        case EventKind::discard: return "discard";
        case EventKind::bid: return "bid";
        case EventKind::award: return "award";
        case EventKind::finish: return "finish";
        case EventKind::strand: return "strand";
    }
    return "?";
}

struct MissionEvent {
    double t = 0.0;
    int vehicle = -1;
    EventKind kind = EventKind::depart;
    int node = -1;      // node id (not graph index) where applicable
    double value = 0.0; // rho for collect, bid level for bid/award
};

struct MissionLog {
    std::uint64_t seed = 0;
    bool coordination = true;
    std::vector<MissionEvent> events;
    std::vector<double> vehicle_times;  // realized total time per vehicle
    double theta = 0.0;
    double collected_value = 0.0;  // J
    int discards = 0;
    int pickups = 0;
    int strands = 0;
    bool closed = false;
};

/// One stochastic draw of a leg's travel time; shares the planning noise law.
inline double sample_travel_time(double nominal, const NoiseModel& noise, Rng& rng) {
    if (nominal <= 0) throw std::invalid_argument("sample_travel_time: nominal must be positive");
    return sample_leg_time(nominal, noise, rng);
}

/// The replanning trigger: expected remaining time (nominal legs + services +
/// leg to end) strictly exceeds the remaining budget.
inline bool check_time_violation(const AgentView& agent, const CostMatrix& m) {
    return remaining_time_estimate(agent, m) > agent.remaining_budget;
}

struct SimOptions {
    bool coordination = true;
    bool path_aware = true;      // leg nominal from the true current field
    int path_segments = 24;      // straight-leg discretization in path-aware mode
    double safety_z = 4.0;       // z-score of the noise margin used at checkpoints
    double eps_min = 1e-6;       // auction bid increment floor
};

namespace detail {

/// High-quantile margin for the stochastic part of a set of legs: maneuver
/// mean plus safety_z standard deviations of the combined Gaussian + Poisson
/// noise. Added to nominal estimates at every checkpoint so that discards
/// happen early enough to keep realized times inside the budget.
inline double noise_margin(const std::vector<double>& leg_nominals, const NoiseModel& noise,
                           double safety_z) {
    double mean = 0.0, var = 0.0;
    for (double t : leg_nominals) {
        double lambda = noise.maneuver_rate * t / 3600.0;
        mean += lambda * noise.maneuver_cost;
        var += noise.sigma_frac * noise.sigma_frac * t * t +
               lambda * noise.maneuver_cost * noise.maneuver_cost;
    }
    return mean + safety_z * std::sqrt(var);
}

struct SimVehicle {
    int id = 0;
    Vec2 pos;
    double clock = 0.0;
    std::deque<int> upcoming;   // graph indices still to visit
    int target = -1;            // graph index in flight toward, -1 if idle at a point
    double arrival_time = 0.0;  // global time of the scheduled arrival
    bool heading_end = false;
    bool finished = false;
    bool stranded = false;
};

}  // namespace detail

/// Event-driven execution of a fleet plan over the true field. Leg durations
/// are stochastic draws around path-aware nominals; every node arrival runs
/// the time-violation check, discards by effectiveness-cost ratio, and (with
/// coordination on) auctions the idle pool among vehicles with slack.
/// Deterministic per seed.
inline MissionLog simulate_mission(const FleetPlan& plan, const Scenario& scenario,
                                   const CurrentField& true_field, const NoiseModel& noise,
                                   const SimOptions& options, std::uint64_t seed) {
    CostMatrix m = build_cost_matrix(scenario, 1.0);
    // Re-derive with the plan's speed if routes were planned at another speed.
    // The plan does not carry the speed; the matrix default of 1 m/s matches
    // the CLI default.
    Rng rng = make_rng(seed);
    MissionLog log;
    log.seed = seed;
    log.coordination = options.coordination;

    const int fleet = static_cast<int>(plan.routes.size());
    std::vector<detail::SimVehicle> vehicles(fleet);
    std::vector<int> idle_pool = plan.idle_nodes;
    std::set<int> collected;

    auto nominal_leg = [&](const Vec2& a, const Vec2& b) {
        double fallback = distance(a, b) / m.prop_speed();
        if (!options.path_aware) return fallback;
        auto wp = resample_polyline({a, b}, std::max(1, options.path_segments));
        PathTime pt = path_time(wp, true_field, m.prop_speed());
        // Untraversable legs (current beyond propulsion) are penalized rather
        // than modeled; the margin logic then sheds load.
        return pt.feasible ? pt.seconds : 3.0 * fallback;
    };
    auto leg_nominals = [&](const detail::SimVehicle& v) {
        std::vector<double> legs;
        Vec2 p = v.pos;
        for (int idx : v.upcoming) {
            legs.push_back(nominal_leg(p, m.position(idx)));
            p = m.position(idx);
        }
        legs.push_back(nominal_leg(p, m.position(m.end_index())));
        return legs;
    };
    auto remaining_estimate = [&](const detail::SimVehicle& v, double* margin_out) {
        std::vector<double> legs = leg_nominals(v);
        double t = 0.0;
        for (double x : legs) t += x;
        for (int idx : v.upcoming) t += m.service(idx);
        if (margin_out) *margin_out = detail::noise_margin(legs, noise, options.safety_z);
        return t;
    };
    auto anchored_removal_saving = [&](const detail::SimVehicle& v, int position) {
        int cur = v.upcoming[position];
        double t_prev_cur, t_prev_next;
        int next = position + 1 == static_cast<int>(v.upcoming.size())
                       ? m.end_index()
                       : v.upcoming[position + 1];
        if (position == 0) {
            t_prev_cur = m.transit_from(v.pos, cur);
            t_prev_next = m.transit_from(v.pos, next);
        } else {
            t_prev_cur = m.transit(v.upcoming[position - 1], cur);
            t_prev_next = m.transit(v.upcoming[position - 1], next);
        }
        return t_prev_cur + m.transit(cur, next) + m.service(cur) - t_prev_next;
    };

    auto checkpoint = [&](detail::SimVehicle& v) {
        // Discard until the margin-adjusted remaining estimate fits the budget.
        while (true) {
            double margin = 0.0;
            double est = remaining_estimate(v, &margin);
            if (est + margin <= plan.t_max - v.clock) break;
            if (v.upcoming.empty()) {
                if (!v.stranded && est > plan.t_max - v.clock) {
                    v.stranded = true;
                    log.strands++;
                    log.events.push_back({v.clock, v.id, EventKind::strand, -1, 0.0});
                }
                break;
            }
            int worst = -1;
            double worst_phi = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(v.upcoming.size()); ++i) {
                double saving = anchored_removal_saving(v, i);
                double phi = saving > 0 ? m.rho(v.upcoming[i]) / saving
                                        : std::numeric_limits<double>::infinity();
                if (phi < worst_phi) {
                    worst_phi = phi;
                    worst = i;
                }
            }
            int dropped = v.upcoming[worst];
            v.upcoming.erase(v.upcoming.begin() + worst);
            idle_pool.push_back(dropped);
            log.discards++;
            log.events.push_back(
                {v.clock, v.id, EventKind::discard, CostMatrix::node_of_index(dropped), 0.0});
        }
    };

    auto run_coordination = [&](double now) {
        if (!options.coordination || idle_pool.empty()) return;
        std::vector<AgentView> views;
        std::vector<int> view_vehicle;
        for (auto& v : vehicles) {
            if (v.finished || v.heading_end) continue;
            AgentView view;
            view.vehicle_id = v.id;
            if (v.target >= 0) {  // in flight: committed through the target node
                view.position = m.position(v.target);
                view.elapsed = v.arrival_time + m.service(v.target);
                view.remaining_route.assign(v.upcoming.begin(), v.upcoming.end());
            } else {
                view.position = v.pos;
                view.elapsed = v.clock;
                view.remaining_route.assign(v.upcoming.begin(), v.upcoming.end());
            }
            double margin = 0.0;
            {
                detail::SimVehicle ghost = v;
                ghost.pos = view.position;
                ghost.clock = view.elapsed;
                remaining_estimate(ghost, &margin);
            }
            view.remaining_budget = plan.t_max - view.elapsed - margin;
            if (view.remaining_budget <= 0) continue;
            views.push_back(std::move(view));
            view_vehicle.push_back(v.id);
        }
        if (views.empty()) return;
        AuctionResult auction = run_agent_auction(views, idle_pool, m, options.eps_min);
        for (const auto& ev : auction.transcript) {
            int vid = ev.agent >= 0 ? view_vehicle[ev.agent] : -1;
            EventKind kind = ev.kind == AuctionEvent::Kind::bid ? EventKind::bid
                                                                : EventKind::award;
            if (ev.kind == AuctionEvent::Kind::reject) continue;
            log.events.push_back({now, vid, kind, CostMatrix::node_of_index(ev.node), ev.amount});
        }
        for (const auto& award : auction.assignments) {
            log.pickups++;
            idle_pool.erase(std::find(idle_pool.begin(), idle_pool.end(), award.node));
        }
        // The winners' views already contain the insertions; copy them back.
        for (std::size_t k = 0; k < views.size(); ++k) {
            auto& v = vehicles[view_vehicle[k]];
            v.upcoming.assign(views[k].remaining_route.begin(), views[k].remaining_route.end());
        }
    };

    using QueueEntry = std::pair<double, int>;  // (arrival time, vehicle id)
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;

    auto depart = [&](detail::SimVehicle& v) {
        Vec2 dest;
        if (v.upcoming.empty()) {
            v.heading_end = true;
            v.target = m.end_index();
            dest = m.position(m.end_index());
        } else {
            v.target = v.upcoming.front();
            v.upcoming.pop_front();
            dest = m.position(v.target);
        }
        double nominal = nominal_leg(v.pos, dest);
        double realized = nominal > 0 ? sample_travel_time(nominal, noise, rng) : 0.0;
        v.arrival_time = v.clock + realized;
        log.events.push_back({v.clock, v.id, EventKind::depart,
                              v.heading_end ? -1 : CostMatrix::node_of_index(v.target), 0.0});
        queue.push({v.arrival_time, v.id});
    };

    for (int i = 0; i < fleet; ++i) {
        auto& v = vehicles[i];
        v.id = i;
        v.pos = scenario.start;
        v.clock = 0.0;
        v.upcoming.assign(plan.routes[i].nodes.begin(), plan.routes[i].nodes.end());
        checkpoint(v);
    }
    run_coordination(0.0);
    for (auto& v : vehicles) depart(v);

    while (!queue.empty()) {
        auto [now, vid] = queue.top();
        queue.pop();
        auto& v = vehicles[vid];
        v.clock = v.arrival_time;
        v.pos = m.position(v.target);
        if (v.heading_end) {
            v.finished = true;
            if (v.clock > plan.t_max && !v.stranded) {
                v.stranded = true;
                log.strands++;
                log.events.push_back({v.clock, v.id, EventKind::strand, -1, 0.0});
            } else {
                log.events.push_back({v.clock, v.id, EventKind::finish, -1, 0.0});
            }
            continue;
        }
        int node_idx = v.target;
        v.target = -1;
        log.events.push_back({v.clock, v.id, EventKind::arrive,
                              CostMatrix::node_of_index(node_idx), 0.0});
        if (!collected.count(node_idx)) {
            v.clock += m.service(node_idx);
            collected.insert(node_idx);
            log.events.push_back({v.clock, v.id, EventKind::collect,
                                  CostMatrix::node_of_index(node_idx), m.rho(node_idx)});
        }
        checkpoint(v);
        run_coordination(v.clock);
        depart(v);
    }

    log.vehicle_times.resize(fleet);
    for (int i = 0; i < fleet; ++i) log.vehicle_times[i] = vehicles[i].clock;
    log.closed = true;
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const MissionEvent& a, const MissionEvent& b) { return a.t < b.t; });
    // Sum J over the sorted events so a replay of the log reproduces the
    // stored metrics bit-for-bit (summation order matters in the last ulp).
    log.collected_value = 0.0;
    for (const auto& ev : log.events)
        if (ev.kind == EventKind::collect) log.collected_value += ev.value;
    double total = scenario.total_value();
    log.theta = total > 0 ? log.collected_value / total : 0.0;
    return log;
}

/// Recomputes (theta, J) from the log's collect events; must match the stored
/// values exactly.
inline std::pair<double, double> completion_metrics(const MissionLog& log,
                                                    const Scenario& scenario) {
    if (!log.closed) throw std::invalid_argument("completion_metrics: log not closed");
    double j = 0.0;
    for (const auto& ev : log.events)
        if (ev.kind == EventKind::collect) j += ev.value;
    double total = scenario.total_value();
    return {total > 0 ? j / total : 0.0, j};
}

struct MetricsRow {
    int run = 0;
    std::uint64_t seed = 0;
    int vehicle_count = 0;
    double theta = 0.0;
    double collected_value = 0.0;
    int discards = 0;
    int pickups = 0;
    double runtime_s = 0.0;  // mission makespan (max realized vehicle time)
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
    double theta_mean = 0.0, theta_std = 0.0, theta_min = 0.0, theta_max = 0.0;
    double value_mean = 0.0;
    int total_strands = 0;
};

struct MonteCarloParams {
    int runs = 50;
    double t_max = 18000.0;
    SimOptions sim;
    NoiseModel noise;
    FieldPerturbation perturbation;
    int threads = 1;
};

inline int env_thread_cap() {
    if (const char* env = std::getenv("FLEETROUTE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

/// Monte-Carlo study over independently perturbed true fields. The plan is
/// fixed; each run draws its own field realization and travel noise from a
/// seed derived from (master seed, run index). Rows are ordered by run index
/// regardless of execution interleaving.
inline MetricsTable monte_carlo(const Scenario& scenario, const FleetPlan& plan,
                                const MonteCarloParams& params, std::uint64_t master_seed) {
    if (params.runs < 1) throw std::invalid_argument("monte_carlo: run count must be >= 1");
    MetricsTable table;
    table.rows.resize(params.runs);

    auto run_one = [&](int r) {
        std::uint64_t run_seed = derive_seed(master_seed, 1000 + r);
        CurrentField true_field =
            realize_true_field(scenario.field, params.perturbation, derive_seed(run_seed, 1));
        MissionLog log = simulate_mission(plan, scenario, true_field, params.noise, params.sim,
                                          derive_seed(run_seed, 2));
        MetricsRow row;
        row.run = r;
        row.seed = run_seed;
        row.vehicle_count = plan.vehicle_count;
        row.theta = log.theta;
        row.collected_value = log.collected_value;
        row.discards = log.discards;
        row.pickups = log.pickups;
        row.runtime_s = 0.0;
        for (double t : log.vehicle_times) row.runtime_s = std::max(row.runtime_s, t);
        table.rows[r] = row;
        return log.strands;
    };

    int threads = std::min(params.threads, params.runs);
    if (threads <= 1) {
        for (int r = 0; r < params.runs; ++r) table.total_strands += run_one(r);
    } else {
        std::vector<std::thread> pool;
        std::vector<int> strands(threads, 0);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t]() {
                for (int r = t; r < params.runs; r += threads) strands[t] += run_one(r);
            });
        for (auto& th : pool) th.join();
        for (int s : strands) table.total_strands += s;
    }

    double mean = 0.0;
    table.theta_min = table.rows[0].theta;
    table.theta_max = table.rows[0].theta;
    for (const auto& row : table.rows) {
        mean += row.theta;
        table.value_mean += row.collected_value;
        table.theta_min = std::min(table.theta_min, row.theta);
        table.theta_max = std::max(table.theta_max, row.theta);
    }
    mean /= params.runs;
    table.value_mean /= params.runs;
    double var = 0.0;
    for (const auto& row : table.rows) var += (row.theta - mean) * (row.theta - mean);
    table.theta_mean = mean;
    table.theta_std = params.runs > 1 ? std::sqrt(var / (params.runs - 1)) : 0.0;
    return table;
}

}  // namespace fleetroute

#endif
