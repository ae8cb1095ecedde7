#include <catch2/catch_amalgamated.hpp>

#include "fleetroute/coordination.hpp"
#include "test_support.hpp"

using namespace fleetroute;
using test_support::make_matrix;

namespace {

// run_auction driver over a fixed psi table with per-agent capacities.
// Retires an agent (award_fn returns false) when its capacity is used up.
AuctionResult table_auction(std::vector<std::vector<double>> psi, std::vector<int> capacity,
                            double eps_min) {
    std::vector<int> idle;
    for (std::size_t j = 0; j < psi[0].size(); ++j) idle.push_back(static_cast<int>(j));
    auto psi_fn = [&](int a, int node) { return std::make_pair(psi[a][node], 0); };
    auto award_fn = [&](const AuctionAssignment& award) { return --capacity[award.agent] > 0; };
    return run_auction(idle, static_cast<int>(psi.size()), eps_min, psi_fn, award_fn);
}

// Best injective assignment value by brute force (each agent at most one
// node, each node at most one agent).
double optimal_assignment(const std::vector<std::vector<double>>& psi) {
    const int agents = static_cast<int>(psi.size());
    const int items = static_cast<int>(psi[0].size());
    double best = 0.0;
    std::vector<int> pick(agents, -1);
    auto rec = [&](auto&& self, int a, int used_mask, double acc) -> void {
        if (a == agents) {
            best = std::max(best, acc);
            return;
        }
        self(self, a + 1, used_mask, acc);  // agent takes nothing
        for (int j = 0; j < items; ++j)
            if (!(used_mask & (1 << j)) && psi[a][j] > 0)
                self(self, a + 1, used_mask | (1 << j), acc + psi[a][j]);
    };
    rec(rec, 0, 0, 0.0);
    return best;
}

}  // namespace

TEST_CASE("bid target: single node with positive profit") {
    auto t = compute_bid_target({0.5}, {0.0});
    REQUIRE(t.has_value());
    CHECK(t->idx == 0);
    CHECK(t->profit == Catch::Approx(0.5));
    CHECK(t->second_profit == 0.0);
}

TEST_CASE("bid target: exhausted budgets yield no target") {
    CHECK_FALSE(compute_bid_target({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}).has_value());
}

TEST_CASE("bid target: argmax of psi minus bid") {
    auto t = compute_bid_target({0.8, 0.6}, {0.5, 0.1});
    REQUIRE(t.has_value());
    CHECK(t->idx == 1);  // profit 0.5 beats 0.3
    CHECK(t->profit == Catch::Approx(0.5));
    CHECK(t->second_profit == Catch::Approx(0.3));
}

TEST_CASE("one agent, one node resolves in at most two rounds") {
    AuctionResult r = table_auction({{0.7}}, {1}, 1e-3);
    REQUIRE(r.assignments.size() == 1);
    CHECK(r.assignments[0].agent == 0);
    CHECK(r.assignments[0].node == 0);
    CHECK(r.rounds <= 2);
    CHECK(r.unassigned.empty());
}

TEST_CASE("three agents and five nodes: four allocated, one agent empty-handed") {
    // Agent 2's budget is exhausted (all psi zero); node 4 is worthless to
    // everyone; agents 0 and 1 can carry two nodes each.
    std::vector<std::vector<double>> psi{{0.9, 0.8, 0.3, 0.2, 0.0},
                                         {0.7, 0.6, 0.5, 0.4, 0.0},
                                         {0.0, 0.0, 0.0, 0.0, 0.0}};
    AuctionResult r = table_auction(psi, {2, 2, 2}, 1e-4);
    CHECK(r.assignments.size() == 4);
    REQUIRE(r.unassigned.size() == 1);
    CHECK(r.unassigned[0] == 4);
    int agent2_wins = 0;
    for (const auto& a : r.assignments)
        if (a.agent == 2) ++agent2_wins;
    CHECK(agent2_wins == 0);
}

TEST_CASE("two agents contesting one node: higher psi wins") {
    AuctionResult r = table_auction({{0.9}, {0.4}}, {1, 1}, 1e-4);
    REQUIRE(r.assignments.size() == 1);
    CHECK(r.assignments[0].agent == 0);
}

TEST_CASE("empty idle set terminates immediately") {
    auto psi_fn = [](int, int) { return std::make_pair(1.0, 0); };
    auto award_fn = [](const AuctionAssignment&) { return true; };
    AuctionResult r = run_auction({}, 3, 1e-3, psi_fn, award_fn);
    CHECK(r.assignments.empty());
    CHECK(r.rounds == 0);
}

TEST_CASE("all-zero psi leaves every node unassigned after one round") {
    AuctionResult r = table_auction({{0.0, 0.0}, {0.0, 0.0}}, {1, 1}, 1e-3);
    CHECK(r.assignments.empty());
    CHECK(r.rounds <= 1);
    CHECK(r.unassigned.size() == 2);
}

TEST_CASE("a lone agent sweeps up every valuable node") {
    std::vector<std::vector<double>> psi{{0.5, 0.0, 0.3, 0.9}};
    AuctionResult r = table_auction(psi, {100}, 1e-3);
    std::vector<int> got;
    for (const auto& a : r.assignments) got.push_back(a.node);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{0, 2, 3});
    REQUIRE(r.unassigned.size() == 1);
    CHECK(r.unassigned[0] == 1);
}

TEST_CASE("auction transcript is deterministic") {
    std::vector<std::vector<double>> psi{{0.9, 0.2, 0.5}, {0.6, 0.7, 0.1}};
    AuctionResult a = table_auction(psi, {2, 2}, 1e-3);
    AuctionResult b = table_auction(psi, {2, 2}, 1e-3);
    REQUIRE(a.transcript.size() == b.transcript.size());
    for (std::size_t i = 0; i < a.transcript.size(); ++i) {
        CHECK(a.transcript[i].agent == b.transcript[i].agent);
        CHECK(a.transcript[i].node == b.transcript[i].node);
        CHECK(a.transcript[i].amount == b.transcript[i].amount);
    }
}

TEST_CASE("auction stays near the optimal injective assignment") {
    Rng rng = make_rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> na(1, 3), nj(1, 4);
    for (int inst = 0; inst < 40; ++inst) {
        int agents = na(rng), items = nj(rng);
        std::vector<std::vector<double>> psi(agents, std::vector<double>(items));
        double max_psi = 0.0;
        for (auto& row : psi)
            for (auto& x : row) {
                x = u(rng) < 0.2 ? 0.0 : u(rng);
                max_psi = std::max(max_psi, x);
            }
        if (max_psi == 0.0) continue;
        double eps = 1e-3 * max_psi;
        std::vector<int> cap(agents, 1);
        AuctionResult r = table_auction(psi, cap, eps);
        double total = 0.0;
        for (const auto& a : r.assignments) total += a.psi;
        CHECK(total >= optimal_assignment(psi) - agents * eps - 1e-12);
    }
}

TEST_CASE("remaining time estimate agrees with a re-summation oracle") {
    CostMatrix m = make_matrix({{300.0, 100.0}, {700.0, 400.0}, {1200.0, 200.0}}, {0.0, 0.0},
                               {1500.0, 500.0}, {0.5, 0.7, 0.2});
    AgentView agent;
    agent.position = {100.0, 50.0};
    agent.remaining_route = {2, 3};
    double expected = m.transit_from(agent.position, 2) + m.service(2) + m.transit(2, 3) +
                      m.service(3) + m.transit(3, m.end_index());
    CHECK(remaining_time_estimate(agent, m) == Catch::Approx(expected).margin(1e-9));
    agent.remaining_route.clear();
    CHECK(remaining_time_estimate(agent, m) ==
          Catch::Approx(m.transit_from(agent.position, m.end_index())).margin(1e-9));
}

TEST_CASE("agent auction splices awards into the winner's route") {
    // One idle node sitting right on agent 0's path; agent 1 is far away.
    CostMatrix m = make_matrix({{500.0, 0.0}, {250.0, 0.0}, {5000.0, 4000.0}}, {0.0, 0.0},
                               {1000.0, 0.0}, {0.5, 0.6, 0.4});
    std::vector<AgentView> agents(2);
    agents[0].vehicle_id = 0;
    agents[0].position = {0.0, 0.0};
    agents[0].remaining_route = {1};
    agents[0].remaining_budget = 5000.0;
    agents[1].vehicle_id = 1;
    agents[1].position = {0.0, 3000.0};
    agents[1].remaining_route = {};
    agents[1].remaining_budget = 1500.0;  // cannot even reach the end point
    AuctionResult r = run_agent_auction(agents, {2}, m, 1e-4);
    REQUIRE(r.assignments.size() == 1);
    CHECK(r.assignments[0].agent == 0);
    CHECK(agents[0].remaining_route == std::vector<int>{2, 1});
    CHECK(agents[1].remaining_route.empty());
}

TEST_CASE("run_auction validates eps_min") {
    auto psi_fn = [](int, int) { return std::make_pair(1.0, 0); };
    auto award_fn = [](const AuctionAssignment&) { return true; };
    CHECK_THROWS_AS(run_auction({0}, 1, 0.0, psi_fn, award_fn), std::invalid_argument);
}
