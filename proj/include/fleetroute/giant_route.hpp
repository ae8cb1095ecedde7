#ifndef FLEETROUTE_GIANT_ROUTE_HPP
#define FLEETROUTE_GIANT_ROUTE_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fleetroute/random.hpp"
#include "fleetroute/scenario.hpp"

namespace fleetroute {

/// Straight-line transit and service costs over the mission graph.
/// Index 0 is the start point, index n-1 the end point, indices 1..n-2 map to
/// node ids 0..n-3. cost(i,j) = transit(i,j) + service(j); entries into the
/// start and out of the end are prohibitive to enforce route orientation.
class CostMatrix {
  public:
    static constexpr double kProhibitive = 1e15;

    CostMatrix() = default;
    CostMatrix(std::vector<Vec2> positions, std::vector<double> service,
               std::vector<double> rho, double prop_speed)
        : positions_(std::move(positions)),
          service_(std::move(service)),
          rho_(std::move(rho)),
          prop_speed_(prop_speed) {
        n_ = static_cast<int>(positions_.size());
        transit_.resize(static_cast<std::size_t>(n_) * n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                transit_[i * n_ + j] = distance(positions_[i], positions_[j]) / prop_speed_;
    }

    int size() const { return n_; }
    int start_index() const { return 0; }
    int end_index() const { return n_ - 1; }
    int node_count() const { return n_ - 2; }

    static int index_of_node(int node_id) { return node_id + 1; }
    static int node_of_index(int index) { return index - 1; }

    double transit(int i, int j) const { return transit_[i * n_ + j]; }
    double service(int j) const { return service_[j]; }
    double rho(int j) const { return rho_[j]; }
    const Vec2& position(int i) const { return positions_[i]; }
    double prop_speed() const { return prop_speed_; }

    /// Arc cost t_ij + t_j, with orientation-enforcing sentinels.
    double cost(int i, int j) const {
        if (j == start_index() || i == end_index()) return kProhibitive;
        return transit(i, j) + service_[j];
    }

    /// Transit time from an arbitrary point to graph index j.
    double transit_from(const Vec2& pos, int j) const {
        return distance(pos, positions_[j]) / prop_speed_;
    }

  private:
    int n_ = 0;
    std::vector<Vec2> positions_;
    std::vector<double> transit_;
    std::vector<double> service_;
    std::vector<double> rho_;
    double prop_speed_ = 1.0;
};

inline CostMatrix build_cost_matrix(const Scenario& scenario, double prop_speed = 1.0) {
    std::vector<Vec2> positions;
    std::vector<double> service;
    std::vector<double> rho;
    positions.push_back(scenario.start);
    service.push_back(0.0);
    rho.push_back(0.0);
    for (const auto& n : scenario.nodes) {
        positions.push_back(n.position);
        service.push_back(service_time(n, scenario));
        rho.push_back(n.data_amount);
    }
    positions.push_back(scenario.end);
    service.push_back(0.0);
    rho.push_back(0.0);
    return CostMatrix(std::move(positions), std::move(service), std::move(rho), prop_speed);
}

/// Energy-unconstrained tour over all nodes, from start to end.
/// `order` holds graph indices, beginning at the start index and ending at
/// the end index.
struct GiantRoute {
    std::vector<int> order;
    double total_time = 0.0;
};

inline double tour_cost(const std::vector<int>& order, const CostMatrix& m) {
    double t = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) t += m.cost(order[i - 1], order[i]);
    return t;
}

struct GaParams {
    int population = 200;
    int generations = 2000;
    double elite_frac = 0.05;
    double mutation_rate = 0.2;
    int stagnation_limit = 400;  // stop early after this many generations without improvement
    int ils_iterations = 800;    // double-bridge restarts of the final local-search polish

    // When set, also solve with the nodes nearest to the start/end pinned as
    // the tour's first/last stops, and prefer that tour if it costs at most
    // (1 + anchor_tolerance) times the unconstrained one. Overhead-lean tours
    // give tighter fleet-size estimates and cheaper segment launch legs.
    bool anchor_endpoints = false;
    double anchor_tolerance = 0.02;
};

namespace detail {

/// Nearest-neighbor tour over the middle indices.
inline std::vector<int> nearest_neighbor_order(const CostMatrix& m) {
    std::vector<int> remaining;
    for (int i = 1; i < m.size() - 1; ++i) remaining.push_back(i);
    std::vector<int> order;
    int cur = m.start_index();
    while (!remaining.empty()) {
        auto best = std::min_element(remaining.begin(), remaining.end(),
                                     [&](int x, int y) { return m.cost(cur, x) < m.cost(cur, y); });
        cur = *best;
        order.push_back(cur);
        remaining.erase(best);
    }
    return order;
}

/// Order crossover (OX) on permutations.
inline std::vector<int> order_crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                                        int cut1, int cut2) {
    int n = static_cast<int>(p1.size());
    std::vector<int> child(n, -1);
    std::vector<int> slice_vals;
    for (int i = cut1; i <= cut2; ++i) {
        child[i] = p1[i];
        slice_vals.push_back(p1[i]);
    }
    auto contains = [&](int v) {
        return std::find(slice_vals.begin(), slice_vals.end(), v) != slice_vals.end();
    };
    int pos = (cut2 + 1) % n;
    for (int k = 0; k < n; ++k) {
        int v = p2[(cut2 + 1 + k) % n];
        if (!contains(v)) {
            child[pos] = v;
            pos = (pos + 1) % n;
        }
    }
    return child;
}

/// First-improvement 2-opt over mid[lock .. n-1-lock] until a local optimum;
/// lock = 1 keeps the first and last stops pinned. Transit is symmetric, so
/// reversing a slice only changes the two boundary arcs; service times cancel.
inline void two_opt(std::vector<int>& mid, const CostMatrix& m, int lock = 0) {
    const int n = static_cast<int>(mid.size());
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = lock; i < n - 1 - lock; ++i) {
            int a = i == 0 ? m.start_index() : mid[i - 1];
            for (int j = i + 1; j < n - lock; ++j) {
                int b = j == n - 1 ? m.end_index() : mid[j + 1];
                double delta = m.transit(a, mid[j]) + m.transit(mid[i], b) -
                               m.transit(a, mid[i]) - m.transit(mid[j], b);
                if (delta < -1e-9) {
                    std::reverse(mid.begin() + i, mid.begin() + j + 1);
                    improved = true;
                }
            }
        }
    }
}

/// One first-improvement Or-opt move: relocate a chain of 1..3 consecutive
/// nodes (possibly reversed) to the cheapest improving slot. Returns false at
/// a local optimum.
inline bool or_opt_pass(std::vector<int>& mid, const CostMatrix& m, int lock = 0) {
    const int n = static_cast<int>(mid.size());
    auto at = [&](int i) {
        return i < 0 ? m.start_index() : (i >= n ? m.end_index() : mid[i]);
    };
    for (int len = 1; len <= 3 && len < n - 2 * lock; ++len) {
        for (int i = lock; i + len <= n - lock; ++i) {
            int a = at(i - 1), u = mid[i], v = mid[i + len - 1], b = at(i + len);
            double removed = m.transit(a, u) + m.transit(v, b) - m.transit(a, b);
            if (removed <= 1e-9) continue;
            for (int j = lock - 1; j < n - lock; ++j) {
                if (j >= i - 1 && j < i + len) continue;
                int p = at(j), q = at(j + 1);
                double fwd = m.transit(p, u) + m.transit(v, q);
                double rev = m.transit(p, v) + m.transit(u, q);
                double added = std::min(fwd, rev) - m.transit(p, q);
                if (added < removed - 1e-9) {
                    std::vector<int> chain(mid.begin() + i, mid.begin() + i + len);
                    if (rev < fwd) std::reverse(chain.begin(), chain.end());
                    mid.erase(mid.begin() + i, mid.begin() + i + len);
                    int slot = j;
                    if (slot > i - 1) slot -= len;
                    mid.insert(mid.begin() + slot + 1, chain.begin(), chain.end());
                    return true;
                }
            }
        }
    }
    return false;
}

/// Alternate 2-opt and Or-opt until neither improves.
inline void polish(std::vector<int>& mid, const CostMatrix& m, int lock = 0) {
    do {
        two_opt(mid, m, lock);
    } while (or_opt_pass(mid, m, lock));
}

}  // namespace detail

/// Genetic-algorithm tour solver: order crossover, swap/2-opt mutation,
/// elitism, nearest-neighbor seeding, then an iterated local search polish
/// (2-opt + Or-opt with double-bridge kicks). Deterministic per seed; the
/// returned tour is never worse than the nearest-neighbor heuristic.
inline GiantRoute solve_giant_route(const CostMatrix& m, const GaParams& params,
                                    std::uint64_t seed) {
    if (m.size() < 3) throw std::invalid_argument("solve_giant_route: need at least one node");
    const int n_mid = m.node_count();
    Rng rng = make_rng(seed);

    auto full_order = [&](const std::vector<int>& mid) {
        std::vector<int> order;
        order.reserve(mid.size() + 2);
        order.push_back(m.start_index());
        order.insert(order.end(), mid.begin(), mid.end());
        order.push_back(m.end_index());
        return order;
    };
    auto eval = [&](const std::vector<int>& mid) { return tour_cost(full_order(mid), m); };

    std::vector<int> base(n_mid);
    std::iota(base.begin(), base.end(), 1);

    if (n_mid == 1) return {full_order(base), eval(base)};

    std::vector<std::vector<int>> pop;
    pop.push_back(detail::nearest_neighbor_order(m));
    detail::polish(pop.back(), m);
    for (int i = 1; i < params.population; ++i) {
        std::vector<int> p = base;
        std::shuffle(p.begin(), p.end(), rng);
        pop.push_back(std::move(p));
    }
    std::vector<double> score(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) score[i] = eval(pop[i]);

    std::uniform_int_distribution<int> pick(0, params.population - 1);
    std::uniform_int_distribution<int> pos(0, n_mid - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int elites = std::max(1, static_cast<int>(params.population * params.elite_frac));

    auto tournament = [&]() {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        int best = a;
        if (score[b] < score[best] || (score[b] == score[best] && b < best)) best = b;
        if (score[c] < score[best] || (score[c] == score[best] && c < best)) best = c;
        return best;
    };

    double best_ever = *std::min_element(score.begin(), score.end());
    int stagnant = 0;
    for (int gen = 0; gen < params.generations && stagnant < params.stagnation_limit; ++gen) {
        std::vector<int> idx(pop.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return score[a] < score[b]; });
        std::vector<std::vector<int>> next;
        std::vector<double> next_score;
        for (int e = 0; e < elites; ++e) {
            next.push_back(pop[idx[e]]);
            next_score.push_back(score[idx[e]]);
        }
        while (static_cast<int>(next.size()) < params.population) {
            const auto& p1 = pop[tournament()];
            const auto& p2 = pop[tournament()];
            int c1 = pos(rng), c2 = pos(rng);
            if (c1 > c2) std::swap(c1, c2);
            std::vector<int> child = detail::order_crossover(p1, p2, c1, c2);
            if (unit(rng) < params.mutation_rate) {
                int a = pos(rng), b = pos(rng);
                if (unit(rng) < 0.5) {
                    std::swap(child[a], child[b]);
                } else {
                    if (a > b) std::swap(a, b);
                    std::reverse(child.begin() + a, child.begin() + b + 1);
                }
            }
            next_score.push_back(eval(child));
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        score = std::move(next_score);
        double gen_best = *std::min_element(score.begin(), score.end());
        if (gen_best < best_ever - 1e-12) {
            best_ever = gen_best;
            stagnant = 0;
        } else {
            ++stagnant;
        }
    }

    // Iterated local search: double-bridge kick, re-polish, keep improvements.
    // With lock = 1 the first and last stops never move.
    auto run_ils = [&](std::vector<int>& mid, double& cost, int lock) {
        if (n_mid - 2 * lock < 4) return;
        std::uniform_int_distribution<int> cut(1 + lock, n_mid - 2 - lock);
        for (int it = 0; it < params.ils_iterations; ++it) {
            int a = cut(rng), b = cut(rng), c = cut(rng);
            int lo = std::min({a, b, c}), hi = std::max({a, b, c});
            int mi = a + b + c - lo - hi;
            if (lo == mi || mi == hi) continue;
            std::vector<int> kicked;
            kicked.reserve(n_mid);
            kicked.insert(kicked.end(), mid.begin(), mid.begin() + lo);
            kicked.insert(kicked.end(), mid.begin() + mi, mid.begin() + hi);
            kicked.insert(kicked.end(), mid.begin() + lo, mid.begin() + mi);
            kicked.insert(kicked.end(), mid.begin() + hi, mid.end());
            detail::polish(kicked, m, lock);
            double kicked_cost = eval(kicked);
            if (kicked_cost < cost - 1e-9) {
                cost = kicked_cost;
                mid = std::move(kicked);
            }
        }
    };

    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (score[i] < score[best]) best = i;
    std::vector<int> mid = pop[best];
    detail::polish(mid, m);
    double mid_cost = eval(mid);
    run_ils(mid, mid_cost, 0);

    if (params.anchor_endpoints && n_mid >= 2) {
        int first = 1, last = 1;
        for (int i = 1; i <= n_mid; ++i) {
            if (m.transit(m.start_index(), i) < m.transit(m.start_index(), first)) first = i;
            if (m.transit(i, m.end_index()) < m.transit(last, m.end_index())) last = i;
        }
        if (first == last) last = first == 1 ? 2 : 1;
        std::vector<int> anchored;
        anchored.push_back(first);
        for (int v : mid)
            if (v != first && v != last) anchored.push_back(v);
        anchored.push_back(last);
        detail::polish(anchored, m, 1);
        double anchored_cost = eval(anchored);
        run_ils(anchored, anchored_cost, 1);
        if (anchored_cost <= mid_cost * (1.0 + params.anchor_tolerance)) {
            mid = std::move(anchored);
            mid_cost = anchored_cost;
        }
    }
    return {full_order(mid), mid_cost};
}

}  // namespace fleetroute

#endif
