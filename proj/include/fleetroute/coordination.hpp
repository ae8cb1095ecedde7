#ifndef FLEETROUTE_COORDINATION_HPP
#define FLEETROUTE_COORDINATION_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fleetroute/route_optimizer.hpp"

namespace fleetroute {

/// A vehicle's view of its own mission state, broadcast when an auction runs.
struct AgentView {
    int vehicle_id = 0;
    Vec2 position;
    double elapsed = 0.0;
    std::vector<int> remaining_route;  // graph indices, current position to end
    double remaining_budget = 0.0;     // T_max - elapsed
};

/// Nominal time to finish the remaining route from the agent's position,
/// including services and the final leg to the end point.
inline double remaining_time_estimate(const AgentView& agent, const CostMatrix& m) {
    double t = 0.0;
    Vec2 pos = agent.position;
    int prev = -1;
    for (int idx : agent.remaining_route) {
        t += (prev < 0 ? m.transit_from(pos, idx) : m.transit(prev, idx)) + m.service(idx);
        prev = idx;
    }
    t += prev < 0 ? m.transit_from(pos, m.end_index()) : m.transit(prev, m.end_index());
    return t;
}

struct AuctionEvent {
    enum class Kind { bid, award, reject };
    Kind kind;
    int round = 0;
    int agent = -1;  // -1 for reject events
    int node = -1;
    double amount = 0.0;  // bid level, or winning bid for awards
};

struct AuctionAssignment {
    int node = -1;      // graph index
    int agent = -1;
    int position = -1;  // insertion position in the winner's remaining route
    double psi = 0.0;
};

struct AuctionResult {
    std::vector<AuctionAssignment> assignments;
    std::vector<int> unassigned;
    int rounds = 0;
    std::vector<AuctionEvent> transcript;
};

/// The node with the best profit psi - price among nodes with psi > 0, or
/// none when every profit is non-positive. `prices` holds each node's current
/// top bid (the level a new bid must beat). `idx` indexes the idle-node list;
/// ties break toward the first (lowest-node-id) entry.
struct BidTarget {
    int idx = -1;
    double profit = 0.0;
    double second_profit = 0.0;  // best profit among the other nodes, floored at 0
};

inline std::optional<BidTarget> compute_bid_target(const std::vector<double>& psi,
                                                   const std::vector<double>& prices) {
    BidTarget best;
    double second = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        if (psi[j] <= 0.0) continue;
        double profit = psi[j] - prices[j];
        if (best.idx < 0 || profit > best.profit) {
            if (best.idx >= 0) second = std::max(second, best.profit);
            best.idx = static_cast<int>(j);
            best.profit = profit;
        } else {
            second = std::max(second, profit);
        }
    }
    if (best.idx < 0 || best.profit <= 0.0) return std::nullopt;
    best.second_profit = std::max(0.0, second);
    return best;
}

/// Per-phase bidding state. psi is fixed for the phase (it is recomputed from
/// the routes after every award, when the whole phase restarts).
struct AuctionState {
    std::vector<int> idle;                    // graph indices, ascending
    std::vector<std::vector<double>> psi;     // [agent][idle idx]
    std::vector<std::vector<int>> insert_pos; // [agent][idle idx]
    std::vector<std::vector<double>> bids;    // [agent][idle idx], nondecreasing
    double eps_min = 1e-3;
    int round = 0;
};

struct RoundOutcome {
    bool bids_changed = false;
    std::optional<AuctionAssignment> award;
};

namespace detail {

/// Highest bidder on idle index j, ties to the lowest vehicle id; -1 when no
/// one has bid.
inline int top_bidder(const AuctionState& state, int j) {
    int holder = -1;
    for (std::size_t a = 0; a < state.bids.size(); ++a)
        if (state.bids[a][j] > 0.0 && (holder < 0 || state.bids[a][j] > state.bids[holder][j]))
            holder = static_cast<int>(a);
    return holder;
}

}  // namespace detail

/// One synchronous bidding round of the price-competition auction. Each
/// node's price is its current top bid; the top bidder tentatively holds the
/// node and sits the round out. Every other agent with a positive-profit
/// target (profit = psi - price) lifts its bid over that target's price by
/// eps_mj = max(eps_min, profit gap + eps_min), so held nodes change hands
/// only through strictly higher bids. When a full round passes with no raise,
/// the first node someone has bid on is awarded to its holder; the caller
/// applies it and restarts the phase.
inline RoundOutcome auction_round(AuctionState& state, std::vector<AuctionEvent>* transcript) {
    const int agents = static_cast<int>(state.bids.size());
    const int items = static_cast<int>(state.idle.size());
    state.round++;
    RoundOutcome out;

    std::vector<double> prices(items, 0.0);
    std::vector<int> holder(items, -1);
    for (int j = 0; j < items; ++j) {
        holder[j] = detail::top_bidder(state, j);
        if (holder[j] >= 0) prices[j] = state.bids[holder[j]][j];
    }
    for (int a = 0; a < agents; ++a) {
        bool holds = false;
        for (int j = 0; j < items && !holds; ++j) holds = holder[j] == a;
        if (holds) continue;  // tentatively winning; nothing to gain by rebidding
        auto target = compute_bid_target(state.psi[a], prices);
        if (!target) continue;
        double eps = std::max(state.eps_min,
                              target->profit - target->second_profit + state.eps_min);
        state.bids[a][target->idx] = prices[target->idx] + eps;
        out.bids_changed = true;
        if (transcript)
            transcript->push_back({AuctionEvent::Kind::bid, state.round, a,
                                   state.idle[target->idx], state.bids[a][target->idx]});
    }
    if (out.bids_changed) return out;

    for (int j = 0; j < items; ++j) {
        if (holder[j] < 0) continue;
        AuctionAssignment award;
        award.node = state.idle[j];
        award.agent = holder[j];
        award.position = state.insert_pos[holder[j]][j];
        award.psi = state.psi[holder[j]][j];
        if (transcript)
            transcript->push_back({AuctionEvent::Kind::award, state.round, holder[j],
                                   award.node, state.bids[holder[j]][j]});
        out.award = award;
        return out;
    }
    return out;
}

/// Runs the distributed idle-node auction to completion. `psi_fn(agent, node)`
/// returns the agent's current insertion ratio and position for a node; it is
/// queried afresh at the start of every phase, since awards change routes.
/// `award_fn(assignment)` applies an award and returns false to retire the
/// winner from further bidding. Terminates when the idle set is empty or a
/// full round passes with no bid changes.
template <class PsiFn, class AwardFn>
AuctionResult run_auction(std::vector<int> idle, int num_agents, double eps_min,
                          PsiFn&& psi_fn, AwardFn&& award_fn) {
    if (eps_min <= 0) throw std::invalid_argument("run_auction: eps_min must be positive");
    std::sort(idle.begin(), idle.end());
    AuctionResult result;
    std::vector<char> active(num_agents, 1);

    while (!idle.empty()) {
        AuctionState state;
        state.idle = idle;
        state.eps_min = eps_min;
        state.psi.assign(num_agents, std::vector<double>(idle.size(), 0.0));
        state.insert_pos.assign(num_agents, std::vector<int>(idle.size(), -1));
        state.bids.assign(num_agents, std::vector<double>(idle.size(), 0.0));
        double max_psi = 0.0;
        for (int a = 0; a < num_agents; ++a) {
            if (!active[a]) continue;
            for (std::size_t j = 0; j < idle.size(); ++j) {
                auto [psi, pos] = psi_fn(a, idle[j]);
                state.psi[a][j] = psi;
                state.insert_pos[a][j] = pos;
                max_psi = std::max(max_psi, psi);
            }
        }
        // Generous cap on top of the analytic bound; phases end far earlier.
        const double bound = (max_psi / eps_min + 1.0) * idle.size() + idle.size() + 4.0;

        bool awarded = false;
        while (true) {
            RoundOutcome out = auction_round(state, &result.transcript);
            result.rounds++;
            if (out.award) {
                result.assignments.push_back(*out.award);
                idle.erase(std::find(idle.begin(), idle.end(), out.award->node));
                if (!award_fn(*out.award)) active[out.award->agent] = 0;
                awarded = true;
                break;
            }
            if (!out.bids_changed) break;
            if (state.round > bound) break;
        }
        if (!awarded) break;  // no further changes; remaining nodes stay idle
    }
    for (int node : idle) {
        result.unassigned.push_back(node);
        result.transcript.push_back({AuctionEvent::Kind::reject, 0, -1, node, 0.0});
    }
    return result;
}

/// Auction among mid-mission agents: psi comes from best-insertion against
/// each agent's remaining slack, and awards splice the node into the winner's
/// remaining route. Agents keep bidding after a win (their slack shrinks).
inline AuctionResult run_agent_auction(std::vector<AgentView>& agents, std::vector<int> idle,
                                       const CostMatrix& m, double eps_min) {
    auto psi_fn = [&](int a, int node) -> std::pair<double, int> {
        const AgentView& agent = agents[a];
        double slack = agent.remaining_budget - remaining_time_estimate(agent, m);
        if (slack <= 0) return {0.0, -1};
        InsertionResult r = detail::best_insertion_impl(
            agent.remaining_route, node, slack, m,
            [&](int j) { return m.transit_from(agent.position, j); });
        return r.accepted ? std::make_pair(r.psi, r.position) : std::make_pair(0.0, -1);
    };
    auto award_fn = [&](const AuctionAssignment& award) {
        AgentView& agent = agents[award.agent];
        agent.remaining_route.insert(agent.remaining_route.begin() + award.position, award.node);
        return true;
    };
    return run_auction(std::move(idle), static_cast<int>(agents.size()), eps_min, psi_fn,
                       award_fn);
}

}  // namespace fleetroute

#endif
