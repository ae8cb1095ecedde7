#ifndef FLEETROUTE_ROUTE_OPTIMIZER_HPP
#define FLEETROUTE_ROUTE_OPTIMIZER_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "fleetroute/pre_planner.hpp"
#include "fleetroute/route.hpp"

namespace fleetroute {

/// Stochastic travel-time model: Gaussian current error proportional to the
/// nominal leg time plus Poisson-counted avoidance maneuvers of fixed cost.
struct NoiseModel {
    double sigma_frac = 0.1;      // std of Gaussian term as fraction of nominal
    double maneuver_rate = 1.0;   // expected maneuvers per hour of transit
    double maneuver_cost = 60.0;  // seconds per maneuver
    double floor_frac = 0.5;      // samples never fall below floor_frac * nominal

    bool degenerate() const {
        return sigma_frac == 0.0 && (maneuver_rate == 0.0 || maneuver_cost == 0.0);
    }
};

/// One draw of the stochastic leg time f(t) = t + dt_current + dt_maneuver,
/// clamped below at floor_frac * nominal.
inline double sample_leg_time(double nominal, const NoiseModel& noise, Rng& rng) {
    double t = nominal;
    if (noise.sigma_frac > 0) {
        std::normal_distribution<double> gauss(0.0, noise.sigma_frac * nominal);
        t += gauss(rng);
    }
    if (noise.maneuver_rate > 0 && noise.maneuver_cost > 0) {
        std::poisson_distribution<int> count(noise.maneuver_rate * nominal / 3600.0);
        t += count(rng) * noise.maneuver_cost;
    }
    return std::max(noise.floor_frac * nominal, t);
}

/// One stochastic sample of a full route's duration (legs sampled, services
/// deterministic).
inline double route_cost_sample(const std::vector<int>& nodes, const CostMatrix& m,
                                const NoiseModel& noise, Rng& rng) {
    double total = 0.0;
    int prev = m.start_index();
    for (int idx : nodes) {
        total += sample_leg_time(m.transit(prev, idx), noise, rng) + m.service(idx);
        prev = idx;
    }
    total += sample_leg_time(m.transit(prev, m.end_index()), noise, rng);
    return total;
}

struct OptimizeParams {
    int population = 64;
    int generations = 160;
    double elite_frac = 0.08;
    double mutation_rate = 0.35;
    int stagnation_limit = 50;
    int samples = 32;        // cost samples per feasibility evaluation
    double quantile = 0.9;   // robustness quantile compared against the budget
};

/// q-quantile of the sampled route cost; the feasibility statistic.
inline double route_cost_quantile(const std::vector<int>& nodes, const CostMatrix& m,
                                  const NoiseModel& noise, double quantile, int samples,
                                  Rng& rng) {
    if (noise.degenerate()) return route_expected_time(nodes, m);
    std::vector<double> draws(samples);
    for (int s = 0; s < samples; ++s) draws[s] = route_cost_sample(nodes, m, noise, rng);
    int k = std::clamp(static_cast<int>(std::ceil(quantile * samples)) - 1, 0, samples - 1);
    std::nth_element(draws.begin(), draws.begin() + k, draws.end());
    return draws[k];
}

/// Time saved by splicing the node at `position` out of the route.
inline double removal_saving(const std::vector<int>& nodes, int position, const CostMatrix& m) {
    int cur = nodes[position];
    int prev = position == 0 ? m.start_index() : nodes[position - 1];
    int next = position + 1 == static_cast<int>(nodes.size()) ? m.end_index()
                                                             : nodes[position + 1];
    return m.transit(prev, cur) + m.transit(cur, next) + m.service(cur) - m.transit(prev, next);
}

struct DropResult {
    Route route;
    std::vector<int> dropped;  // graph indices, in drop order
    double saved = 0.0;
};

/// Repeatedly removes the minimum effectiveness-cost-ratio (rho / time saved)
/// node until the cumulative saving reaches `required_saving` or the route is
/// empty. Ratios are recomputed after each removal; ties break on the lowest
/// node index.
inline DropResult drop_least_efficient(const Route& route, double required_saving,
                                       const CostMatrix& m) {
    DropResult result;
    std::vector<int> nodes = route.nodes;
    while (result.saved < required_saving && !nodes.empty()) {
        int worst = -1;
        double worst_phi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
            double saving = removal_saving(nodes, i, m);
            double phi = saving > 0 ? m.rho(nodes[i]) / saving
                                    : std::numeric_limits<double>::infinity();
            if (phi < worst_phi || (phi == worst_phi && worst >= 0 && nodes[i] < nodes[worst])) {
                worst_phi = phi;
                worst = i;
            }
        }
        if (worst < 0) break;
        result.saved += removal_saving(nodes, worst, m);
        result.dropped.push_back(nodes[worst]);
        nodes.erase(nodes.begin() + worst);
    }
    result.route = make_route(route.vehicle_id, std::move(nodes), m);
    return result;
}

struct InsertionResult {
    bool accepted = false;
    int position = -1;   // insertion index into the route's node list
    double psi = 0.0;    // rho / added time
    double delta_t = 0.0;
};

namespace detail {

/// Position-scan insertion with pluggable first/last-leg costs, so the same
/// scan serves both pre-departure planning (anchored at the mission start)
/// and mid-mission agents (anchored at the vehicle position).
template <class StartTransit>
InsertionResult best_insertion_impl(const std::vector<int>& nodes, int node,
                                    double budget_remaining, const CostMatrix& m,
                                    StartTransit&& transit_from_anchor) {
    InsertionResult best;
    const int len = static_cast<int>(nodes.size());
    for (int i = 0; i <= len; ++i) {
        double t_prev_node = i == 0 ? transit_from_anchor(node) : m.transit(nodes[i - 1], node);
        int next = i == len ? m.end_index() : nodes[i];
        double t_node_next = m.transit(node, next);
        double t_prev_next = i == 0 ? transit_from_anchor(next)
                                    : m.transit(nodes[i - 1], next);
        double delta = t_prev_node + t_node_next + m.service(node) - t_prev_next;
        if (!(budget_remaining > delta)) continue;  // strict, per the bid feasibility rule
        double psi = m.rho(node) / std::max(delta, 1e-12);
        if (psi > best.psi) {
            best.accepted = true;
            best.position = i;
            best.psi = psi;
            best.delta_t = delta;
        }
    }
    return best;
}

}  // namespace detail

/// Best feasible insertion position for `node` and its insertion ratio psi.
/// Positions whose added time reaches `budget_remaining` are excluded; if all
/// positions are excluded the node is rejected with psi = 0.
inline InsertionResult best_insertion(const Route& route, int node, double budget_remaining,
                                      const CostMatrix& m) {
    return detail::best_insertion_impl(
        route.nodes, node, budget_remaining, m,
        [&](int j) { return m.transit(m.start_index(), j); });
}

namespace detail {

/// Greedy ratio-insertion from an existing (possibly empty) route: repeatedly
/// insert the max-psi pool node while the q-quantile sampled cost stays within
/// budget. Lower bound for the GA, and the extension step after it.
inline std::vector<int> greedy_ratio_route(const std::vector<int>& node_set, double budget,
                                           const CostMatrix& m, const NoiseModel& noise,
                                           const OptimizeParams& params, Rng& rng,
                                           std::vector<int> route = {}) {
    std::vector<int> pool;
    for (int v : node_set)
        if (std::find(route.begin(), route.end(), v) == route.end()) pool.push_back(v);
    std::sort(pool.begin(), pool.end());
    while (true) {
        double used = route_cost_quantile(route, m, noise, params.quantile, params.samples, rng);
        double slack = budget - used;
        int best_node = -1;
        InsertionResult best;
        for (int cand : pool) {
            Route tmp;
            tmp.nodes = route;
            InsertionResult r = best_insertion(tmp, cand, slack, m);
            if (r.accepted && r.psi > best.psi) {
                best = r;
                best_node = cand;
            }
        }
        if (best_node < 0) break;
        std::vector<int> candidate = route;
        candidate.insert(candidate.begin() + best.position, best_node);
        double q = route_cost_quantile(candidate, m, noise, params.quantile, params.samples, rng);
        if (q > budget) {
            pool.erase(std::find(pool.begin(), pool.end(), best_node));
            continue;
        }
        route = std::move(candidate);
        pool.erase(std::find(pool.begin(), pool.end(), best_node));
    }
    return route;
}

}  // namespace detail

/// Time-budgeted orienteering optimization over (subset, order) chromosomes.
/// A candidate is feasible when the q-quantile of its sampled cost fits the
/// budget; fitness is lexicographic (collected value, then expected time).
/// Deterministic per seed, and never worse in value than the greedy
/// ratio-insertion heuristic on the same input.
inline Route optimize_route(const std::vector<int>& node_set, double budget,
                            const CostMatrix& m, const NoiseModel& noise,
                            const OptimizeParams& params, std::uint64_t seed) {
    if (budget <= 0) throw std::invalid_argument("optimize_route: budget must be positive");
    Rng rng = make_rng(seed);
    const int n = static_cast<int>(node_set.size());
    if (n == 0) return make_route(0, {}, m);

    struct Individual {
        std::vector<int> perm;  // permutation of node_set
        int k = 0;              // first k entries are included
        double value = 0.0;
        double expected = 0.0;
        double quantile = 0.0;
        bool feasible = false;
    };
    auto evaluate = [&](Individual& ind) {
        std::vector<int> nodes(ind.perm.begin(), ind.perm.begin() + ind.k);
        ind.value = route_value(nodes, m);
        ind.expected = route_expected_time(nodes, m);
        ind.quantile =
            route_cost_quantile(nodes, m, noise, params.quantile, params.samples, rng);
        ind.feasible = ind.quantile <= budget;
    };
    // Feasible beats infeasible; then value desc, expected asc; infeasible
    // ranked by smaller budget excess. Values are summed in permutation
    // order, so equal node sets can differ in the last ulp; compare with a
    // tolerance so the time tie-break still applies.
    auto better = [&](const Individual& a, const Individual& b) {
        if (a.feasible != b.feasible) return a.feasible;
        if (a.feasible) {
            if (std::fabs(a.value - b.value) > 1e-9) return a.value > b.value;
            return a.expected < b.expected;
        }
        return a.quantile < b.quantile;
    };

    std::vector<int> greedy =
        detail::greedy_ratio_route(node_set, budget, m, noise, params, rng);

    std::vector<Individual> pop;
    {
        Individual g;
        g.perm = greedy;
        for (int v : node_set)
            if (std::find(greedy.begin(), greedy.end(), v) == greedy.end()) g.perm.push_back(v);
        g.k = static_cast<int>(greedy.size());
        evaluate(g);
        pop.push_back(std::move(g));
    }
    std::uniform_int_distribution<int> klen(0, n);
    for (int i = 1; i < params.population; ++i) {
        Individual ind;
        ind.perm = node_set;
        std::shuffle(ind.perm.begin(), ind.perm.end(), rng);
        ind.k = klen(rng);
        evaluate(ind);
        pop.push_back(std::move(ind));
    }

    Individual best_ever = pop[0];
    for (const auto& ind : pop)
        if (better(ind, best_ever)) best_ever = ind;

    std::uniform_int_distribution<int> pick(0, params.population - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int elites = std::max(1, static_cast<int>(params.population * params.elite_frac));
    auto tournament = [&]() -> const Individual& {
        int a = pick(rng), b = pick(rng);
        return better(pop[a], pop[b]) ? pop[a] : pop[b];
    };

    int stagnant = 0;
    for (int gen = 0; gen < params.generations && stagnant < params.stagnation_limit; ++gen) {
        std::vector<int> idx(pop.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return better(pop[a], pop[b]); });
        std::vector<Individual> next;
        for (int e = 0; e < elites; ++e) next.push_back(pop[idx[e]]);
        while (static_cast<int>(next.size()) < params.population) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();
            Individual child;
            if (n >= 2) {
                std::uniform_int_distribution<int> pos(0, n - 1);
                int c1 = pos(rng), c2 = pos(rng);
                if (c1 > c2) std::swap(c1, c2);
                child.perm = detail::order_crossover(p1.perm, p2.perm, c1, c2);
            } else {
                child.perm = p1.perm;
            }
            child.k = unit(rng) < 0.5 ? p1.k : p2.k;
            if (unit(rng) < params.mutation_rate) {
                double r = unit(rng);
                std::uniform_int_distribution<int> pos(0, n - 1);
                if (r < 0.3 && n >= 2) {
                    std::swap(child.perm[pos(rng)], child.perm[pos(rng)]);
                } else if (r < 0.6 && child.k >= 2) {
                    std::uniform_int_distribution<int> kp(0, child.k - 1);
                    int a = kp(rng), b = kp(rng);
                    if (a > b) std::swap(a, b);
                    std::reverse(child.perm.begin() + a, child.perm.begin() + b + 1);
                } else if (r < 0.8) {
                    child.k = std::min(n, child.k + 1);
                } else {
                    child.k = std::max(0, child.k - 1);
                }
            }
            evaluate(child);
            if (better(child, best_ever)) best_ever = child;
            next.push_back(std::move(child));
        }
        bool improved = false;
        for (const auto& ind : next)
            if (better(ind, pop[idx[0]])) { improved = true; break; }
        stagnant = improved ? 0 : stagnant + 1;
        pop = std::move(next);
    }

    std::vector<int> nodes(best_ever.perm.begin(), best_ever.perm.begin() + best_ever.k);
    if (!best_ever.feasible) nodes.clear();  // empty route is always feasible
    // Shorten the winning order (value unchanged), then spend any slack the
    // shorter order opened up on further greedy insertions.
    detail::polish(nodes, m);
    nodes = detail::greedy_ratio_route(node_set, budget, m, noise, params, rng,
                                       std::move(nodes));
    return make_route(0, std::move(nodes), m);
}

struct PreplanParams {
    double prop_speed = 1.0;
    // Overhead-lean giant routes: anchoring the tour ends near the start and
    // end points tightens the fleet-size estimate and shortens launch legs.
    GaParams gr_ga = [] {
        GaParams g;
        g.anchor_endpoints = true;
        return g;
    }();
    OptimizeParams optimizer;
    NoiseModel noise;
    bool overhead_aware_segmentation = true;
    BalanceObjective balance = BalanceObjective::absolute;
    int max_sweeps = 4;
};

namespace detail {

/// Idle-node pickup sweep shared by the GR and k-means pipelines: insert the
/// max-psi idle node into each route while the quantile cost stays in budget.
inline bool pickup_sweep(std::vector<Route>& routes, std::vector<int>& idle, double budget,
                         const CostMatrix& m, const NoiseModel& noise,
                         const OptimizeParams& params, Rng& rng) {
    bool changed = false;
    for (auto& route : routes) {
        while (!idle.empty()) {
            double used =
                route_cost_quantile(route.nodes, m, noise, params.quantile, params.samples, rng);
            double slack = budget - used;
            if (slack <= 0) break;
            int best_node = -1;
            InsertionResult best;
            for (int cand : idle) {
                InsertionResult r = best_insertion(route, cand, slack, m);
                if (r.accepted && (r.psi > best.psi ||
                                   (r.psi == best.psi && best_node >= 0 && cand < best_node))) {
                    best = r;
                    best_node = cand;
                }
            }
            if (best_node < 0) break;
            std::vector<int> candidate = route.nodes;
            candidate.insert(candidate.begin() + best.position, best_node);
            double q =
                route_cost_quantile(candidate, m, noise, params.quantile, params.samples, rng);
            idle.erase(std::find(idle.begin(), idle.end(), best_node));
            if (q > budget) continue;  // node stays out of this route for this sweep
            route.nodes = std::move(candidate);
            route.expected_time = route_expected_time(route.nodes, m);
            route.expected_value = route_value(route.nodes, m);
            changed = true;
        }
    }
    return changed;
}

/// Cross-route relocation sweep: move a node into another route whenever the
/// destination can absorb it for strictly less travel time than the source
/// spends on it, while the destination stays inside the quantile budget. The
/// planned value is unchanged, but the freed time lets later pickup sweeps add
/// more nodes; the strict-decrease test keeps the sweep loop-free.
inline bool relocate_sweep(std::vector<Route>& routes, double budget, const CostMatrix& m,
                           const NoiseModel& noise, const OptimizeParams& params, Rng& rng) {
    bool changed = false;
    for (std::size_t s = 0; s < routes.size(); ++s) {
        Route& src = routes[s];
        for (std::size_t i = 0; i < src.nodes.size();) {
            int node = src.nodes[i];
            int prev = i == 0 ? m.start_index() : src.nodes[i - 1];
            int next = i + 1 == src.nodes.size() ? m.end_index() : src.nodes[i + 1];
            double removal_gain = m.transit(prev, node) + m.transit(node, next) +
                                  m.service(node) - m.transit(prev, next);
            std::size_t best_dst = s;
            InsertionResult best;
            for (std::size_t d = 0; d < routes.size(); ++d) {
                if (d == s) continue;
                double used = route_cost_quantile(routes[d].nodes, m, noise, params.quantile,
                                                  params.samples, rng);
                InsertionResult r = best_insertion(routes[d], node, budget - used, m);
                if (r.accepted && r.delta_t < removal_gain - 1e-9 &&
                    (best_dst == s || r.delta_t < best.delta_t)) {
                    best = r;
                    best_dst = d;
                }
            }
            if (best_dst != s) {
                std::vector<int> candidate = routes[best_dst].nodes;
                candidate.insert(candidate.begin() + best.position, node);
                double q = route_cost_quantile(candidate, m, noise, params.quantile,
                                               params.samples, rng);
                if (q <= budget) {
                    routes[best_dst].nodes = std::move(candidate);
                    routes[best_dst].expected_time = route_expected_time(routes[best_dst].nodes, m);
                    routes[best_dst].expected_value = route_value(routes[best_dst].nodes, m);
                    src.nodes.erase(src.nodes.begin() + i);
                    src.expected_time = route_expected_time(src.nodes, m);
                    src.expected_value = route_value(src.nodes, m);
                    changed = true;
                    continue;  // the next node has shifted into position i
                }
            }
            ++i;
        }
    }
    return changed;
}

/// Cross-route exchange sweep: swap one node of route a with one node of
/// route b when the swap strictly cuts their combined expected travel time
/// and both routes stay inside the quantile budget. Unlike relocation this
/// works even when every route is saturated, trimming overhead that later
/// pickups can spend.
inline bool exchange_sweep(std::vector<Route>& routes, double budget, const CostMatrix& m,
                           const NoiseModel& noise, const OptimizeParams& params, Rng& rng) {
    auto anchor = [&](int j) { return m.transit(m.start_index(), j); };
    auto removal_gain = [&](const std::vector<int>& nodes, std::size_t i) {
        int prev = i == 0 ? m.start_index() : nodes[i - 1];
        int next = i + 1 == nodes.size() ? m.end_index() : nodes[i + 1];
        return m.transit(prev, nodes[i]) + m.transit(nodes[i], next) + m.service(nodes[i]) -
               m.transit(prev, next);
    };
    bool changed = false;
    for (std::size_t a = 0; a < routes.size(); ++a)
        for (std::size_t b = a + 1; b < routes.size(); ++b) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (std::size_t i = 0; i < routes[a].nodes.size() && !improved; ++i)
                    for (std::size_t j = 0; j < routes[b].nodes.size() && !improved; ++j) {
                        int x = routes[a].nodes[i], y = routes[b].nodes[j];
                        double gain = removal_gain(routes[a].nodes, i) +
                                      removal_gain(routes[b].nodes, j);
                        std::vector<int> ra = routes[a].nodes;
                        ra.erase(ra.begin() + i);
                        std::vector<int> rb = routes[b].nodes;
                        rb.erase(rb.begin() + j);
                        InsertionResult iy = best_insertion_impl(ra, y, budget, m, anchor);
                        InsertionResult ix = best_insertion_impl(rb, x, budget, m, anchor);
                        if (!iy.accepted || !ix.accepted ||
                            iy.delta_t + ix.delta_t >= gain - 1e-9)
                            continue;
                        ra.insert(ra.begin() + iy.position, y);
                        rb.insert(rb.begin() + ix.position, x);
                        if (route_cost_quantile(ra, m, noise, params.quantile, params.samples,
                                                rng) > budget ||
                            route_cost_quantile(rb, m, noise, params.quantile, params.samples,
                                                rng) > budget)
                            continue;
                        routes[a].nodes = std::move(ra);
                        routes[b].nodes = std::move(rb);
                        for (Route* r : {&routes[a], &routes[b]}) {
                            r->expected_time = route_expected_time(r->nodes, m);
                            r->expected_value = route_value(r->nodes, m);
                        }
                        improved = changed = true;
                    }
            }
        }
    return changed;
}

/// Value-upgrade sweep: replace an on-route node with a strictly
/// higher-value idle node when the edited route still fits the quantile
/// budget. Saturated routes cannot grow, but they can still trade their
/// cheapest cargo for better cargo; the evicted node returns to the idle
/// pool. Each accepted trade strictly raises the planned value, so the sweep
/// terminates.
inline bool upgrade_sweep(std::vector<Route>& routes, std::vector<int>& idle, double budget,
                          const CostMatrix& m, const NoiseModel& noise,
                          const OptimizeParams& params, Rng& rng) {
    auto anchor = [&](int j) { return m.transit(m.start_index(), j); };
    bool changed = false;
    for (auto& route : routes) {
        bool improved = true;
        while (improved) {
            improved = false;
            // Best value gain over all (route node, idle node) trades; ties go
            // to the cheaper edited route.
            std::size_t best_i = 0;
            int best_y = -1, best_pos = -1;
            double best_gain = 0.0, best_delta = 0.0;
            for (std::size_t i = 0; i < route.nodes.size(); ++i) {
                std::vector<int> reduced = route.nodes;
                reduced.erase(reduced.begin() + i);
                for (int y : idle) {
                    double gain = m.rho(y) - m.rho(route.nodes[i]);
                    if (gain <= 0.0 || gain < best_gain) continue;
                    InsertionResult r = best_insertion_impl(reduced, y, budget, m, anchor);
                    if (!r.accepted) continue;
                    if (gain > best_gain || r.delta_t < best_delta) {
                        std::vector<int> candidate = reduced;
                        candidate.insert(candidate.begin() + r.position, y);
                        if (route_cost_quantile(candidate, m, noise, params.quantile,
                                                params.samples, rng) > budget)
                            continue;
                        best_i = i;
                        best_y = y;
                        best_pos = r.position;
                        best_gain = gain;
                        best_delta = r.delta_t;
                    }
                }
            }
            if (best_y < 0) break;
            int evicted = route.nodes[best_i];
            route.nodes.erase(route.nodes.begin() + best_i);
            route.nodes.insert(route.nodes.begin() + best_pos, best_y);
            route.expected_time = route_expected_time(route.nodes, m);
            route.expected_value = route_value(route.nodes, m);
            idle.erase(std::find(idle.begin(), idle.end(), best_y));
            idle.push_back(evicted);
            std::sort(idle.begin(), idle.end());
            improved = changed = true;
        }
    }
    return changed;
}

inline FleetPlan finish_plan(std::vector<Route> routes, const CostMatrix& m, double t_max,
                             int vehicle_count, const NoiseModel& noise,
                             const OptimizeParams& params, std::uint64_t seed,
                             int max_sweeps) {
    Rng rng = make_rng(derive_seed(seed, 0x9d1c));
    auto collect_idle = [&]() {
        std::vector<char> on_route(m.size(), 0);
        for (const auto& r : routes)
            for (int idx : r.nodes) on_route[idx] = 1;
        std::vector<int> idle;
        for (int idx = 1; idx < m.size() - 1; ++idx)
            if (!on_route[idx]) idle.push_back(idx);
        return idle;
    };
    // Alternate cross-route relocations, idle pickups, and route
    // re-optimization until a fixed point.
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = relocate_sweep(routes, t_max, m, noise, params, rng);
        moved = exchange_sweep(routes, t_max, m, noise, params, rng) || moved;
        std::vector<int> idle = collect_idle();
        bool changed = pickup_sweep(routes, idle, t_max, m, noise, params, rng) || moved;
        changed = upgrade_sweep(routes, idle, t_max, m, noise, params, rng) || changed;
        if (!changed) break;
        if (sweep + 1 < max_sweeps) {
            for (std::size_t v = 0; v < routes.size(); ++v) {
                Route improved = optimize_route(routes[v].nodes, t_max, m, noise, params,
                                                derive_seed(seed, 0xa100 + sweep * 31 + v));
                if (improved.expected_value >= routes[v].expected_value - 1e-12) {
                    improved.vehicle_id = routes[v].vehicle_id;
                    routes[v] = std::move(improved);
                }
            }
        }
    }

    FleetPlan plan;
    plan.vehicle_count = vehicle_count;
    plan.t_max = t_max;
    plan.idle_nodes = collect_idle();
    plan.routes = std::move(routes);
    return plan;
}

}  // namespace detail

/// The full pre-departure pipeline: giant route, fleet sizing, balanced
/// segmentation, per-vehicle budgeted optimization, then iterative idle-node
/// pickups until no route changes.
inline FleetPlan preplan_fleet(const Scenario& scenario, double t_max,
                               const PreplanParams& params, std::uint64_t seed) {
    CostMatrix m = build_cost_matrix(scenario, params.prop_speed);
    GiantRoute gr = solve_giant_route(m, params.gr_ga, derive_seed(seed, 0x6a01));
    double overhead = estimate_overhead(gr, m);
    int vehicle_count = estimate_fleet_size(gr.total_time, overhead, t_max);
    vehicle_count = std::min(vehicle_count, m.node_count());
    Segmentation seg = segment_giant_route(gr, vehicle_count, m,
                                           params.overhead_aware_segmentation, params.balance);

    std::vector<Route> routes;
    for (int v = 0; v < vehicle_count; ++v) {
        Route r = optimize_route(seg.segments[v], t_max, m, params.noise, params.optimizer,
                                 derive_seed(seed, 0x5e90 + v));
        r.vehicle_id = v;
        routes.push_back(std::move(r));
    }
    return detail::finish_plan(std::move(routes), m, t_max, vehicle_count, params.noise,
                               params.optimizer, seed, params.max_sweeps);
}

/// Baseline pipeline: k-means allocation with a fixed vehicle count, then the
/// same per-vehicle route optimization. The cluster assignment is final —
/// nodes a vehicle cannot fit stay idle rather than moving to another
/// vehicle's route, which is the fixed-assignment semantics of the clustering
/// baseline (the cross-vehicle pickup loop belongs to the segmentation
/// pipeline).
inline FleetPlan preplan_fleet_kmeans(const Scenario& scenario, double t_max, int vehicle_count,
                                      const PreplanParams& params, std::uint64_t seed) {
    CostMatrix m = build_cost_matrix(scenario, params.prop_speed);
    FleetPlan clusters = kmeans_allocation(scenario, vehicle_count, derive_seed(seed, 0x4b11));
    FleetPlan plan;
    plan.vehicle_count = vehicle_count;
    plan.t_max = t_max;
    std::vector<char> on_route(m.size(), 0);
    for (int v = 0; v < vehicle_count; ++v) {
        // Each vehicle may still pick up nodes of its own cluster it first
        // dropped, so optimize against the full cluster.
        Route r = optimize_route(clusters.routes[v].nodes, t_max, m, params.noise,
                                 params.optimizer, derive_seed(seed, 0x5e90 + v));
        r.vehicle_id = v;
        for (int idx : r.nodes) on_route[idx] = 1;
        plan.routes.push_back(std::move(r));
    }
    for (int idx = 1; idx < m.size() - 1; ++idx)
        if (!on_route[idx]) plan.idle_nodes.push_back(idx);
    return plan;
}

}  // namespace fleetroute

#endif
