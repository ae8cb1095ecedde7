#include <catch2/catch_amalgamated.hpp>

#include "fleetroute/transit.hpp"
#include "test_support.hpp"

using namespace fleetroute;

namespace {

// Independent oracle: search the heading space for the propulsion direction
// whose vector sum with the current lies along the tangent; return the best
// along-track speed found.
double heading_search_speed(const Vec2& tangent, const Vec2& current, double prop) {
    double best = -1.0;
    const int steps = 2000000;
    for (int i = 0; i < steps; ++i) {
        double theta = 2.0 * M_PI * i / steps;
        Vec2 vel{prop * std::cos(theta) + current.x, prop * std::sin(theta) + current.y};
        double along = dot(vel, tangent);
        double cross = vel.x * tangent.y - vel.y * tangent.x;
        if (std::fabs(cross) < 1e-5 && along > best) best = along;
    }
    return best;
}

CurrentField near_uniform_current(double speed, const Vec2& at) {
    // A single very distant, very wide vortex produces an almost uniform +x
    // current of the requested speed at the probe location.
    double d = 1e7;
    LambVortex v;
    v.center = {at.x, at.y + d};
    v.radius = 1e7;
    v.strength = speed * 2.0 * M_PI * d / (1.0 - std::exp(-1.0));
    CurrentField field;
    field.vortexes.push_back(v);
    return field;
}

}  // namespace

TEST_CASE("ground speed basic cases") {
    Vec2 tangent{1.0, 0.0};
    CHECK(ground_speed(tangent, {0.0, 0.0}, 1.0).value() == Catch::Approx(1.0));
    CHECK(ground_speed(tangent, {0.3, 0.0}, 1.0).value() == Catch::Approx(1.3));
    CHECK_FALSE(ground_speed(tangent, {0.0, 1.2}, 1.0).has_value());
    CHECK(ground_speed(tangent, {-0.3, 0.0}, 1.0).value() == Catch::Approx(0.7));
    // Full headwind at propulsion speed: no forward progress.
    CHECK_FALSE(ground_speed(tangent, {-1.0, 0.0}, 1.0).has_value());
}

TEST_CASE("ground speed 3-4-5 case matches a heading-search oracle") {
    Vec2 tangent{1.0, 0.0};
    Vec2 current{0.0, 0.6};
    double got = ground_speed(tangent, current, 1.0).value();
    CHECK(got == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(got == Catch::Approx(heading_search_speed(tangent, current, 1.0)).margin(1e-4));
}

TEST_CASE("straight path in zero current") {
    CurrentField field;
    std::vector<Vec2> wp{{0.0, 0.0}, {3600.0, 0.0}};
    PathTime t = path_time(wp, field, 1.0);
    CHECK(t.feasible);
    CHECK(t.seconds == Catch::Approx(3600.0));
}

TEST_CASE("straight path with a favorable along-track current") {
    CurrentField field = near_uniform_current(0.2, {1800.0, 0.0});
    std::vector<Vec2> wp{{0.0, 0.0}, {3600.0, 0.0}};
    PathTime t = path_time(wp, field, 1.0);
    CHECK(t.feasible);
    CHECK(t.seconds == Catch::Approx(3000.0).margin(1.0));
}

TEST_CASE("dogleg path time matches dense numeric integration") {
    CurrentField field;
    field.vortexes.push_back({{1500.0, 400.0}, 150.0, 300.0});
    std::vector<Vec2> control{{0.0, 0.0}, {1500.0, 800.0}, {3000.0, 0.0}};
    PathTime coarse = path_time(control, field, 1.0);
    PathTime dense = path_time(resample_polyline(control, 10000), field, 1.0);
    REQUIRE(coarse.feasible);
    REQUIRE(dense.feasible);
    CHECK(coarse.seconds == Catch::Approx(dense.seconds).epsilon(0.01));
}

TEST_CASE("discretization converges") {
    CurrentField field;
    field.vortexes.push_back({{1500.0, 400.0}, 150.0, 300.0});
    std::vector<Vec2> control{{0.0, 0.0}, {1500.0, 800.0}, {3000.0, 0.0}};
    double t50 = path_time(resample_polyline(control, 50), field, 1.0).seconds;
    double t100 = path_time(resample_polyline(control, 100), field, 1.0).seconds;
    CHECK(std::fabs(t50 - t100) / t100 < 0.005);
}

TEST_CASE("path time respects the kinematic lower bound") {
    CurrentField field;
    field.vortexes.push_back({{800.0, 300.0}, 200.0, 250.0});
    std::vector<Vec2> wp = resample_polyline({{0.0, 0.0}, {2000.0, 600.0}}, 40);
    double max_current = 0.0;
    for (const auto& p : wp) max_current = std::max(max_current, norm(field_velocity(p, field)));
    PathTime t = path_time(wp, field, 1.0);
    REQUIRE(t.feasible);
    double length = 0.0;
    for (std::size_t i = 1; i < wp.size(); ++i) length += distance(wp[i - 1], wp[i]);
    CHECK(t.seconds >= length / (1.0 + max_current) - 1e-9);
}

TEST_CASE("resample keeps endpoints and equalizes arclength") {
    std::vector<Vec2> control{{0.0, 0.0}, {100.0, 0.0}, {100.0, 100.0}};
    auto wp = resample_polyline(control, 8);
    REQUIRE(wp.size() == 9);
    CHECK(wp.front() == control.front());
    CHECK(distance(wp.back(), control.back()) < 1e-9);
    double expected = 200.0 / 8.0;
    for (std::size_t i = 1; i < wp.size(); ++i)
        CHECK(distance(wp[i - 1], wp[i]) == Catch::Approx(expected).margin(1e-9));
}

TEST_CASE("plan_path in calm water is near straight-line optimal") {
    CurrentField field;
    PathPlannerParams params;
    Path p = plan_path({0.0, 0.0}, {2500.0, 1000.0}, field, {}, params, 4);
    PathTime t = path_time(p, field, params.prop_speed);
    double straight = distance({0.0, 0.0}, {2500.0, 1000.0}) / params.prop_speed;
    REQUIRE(t.feasible);
    CHECK(t.seconds <= straight * 1.01);
}

TEST_CASE("plan_path clears an obstacle on the chord") {
    CurrentField field;
    std::vector<Circle> obstacles{{{1000.0, 0.0}, 200.0}};
    PathPlannerParams params;
    Path p = plan_path({0.0, 0.0}, {2000.0, 0.0}, field, obstacles, params, 9);
    for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
        double d = segment_point_distance(p.waypoints[i - 1], p.waypoints[i],
                                          obstacles[0].center);
        CHECK(d >= obstacles[0].radius - 1e-9);
    }
    double straight = 2000.0 / params.prop_speed;
    CHECK(path_time(p, field, params.prop_speed).seconds > straight);
}

TEST_CASE("plan_path never does worse than the straight chord") {
    CurrentField field;
    field.vortexes.push_back({{1000.0, 300.0}, 180.0, 400.0});
    PathPlannerParams params;
    Path p = plan_path({0.0, 0.0}, {2000.0, 0.0}, field, {}, params, 21);
    double straight =
        path_time(resample_polyline({{0.0, 0.0}, {2000.0, 0.0}}, params.discretization), field,
                  params.prop_speed)
            .seconds;
    CHECK(path_time(p, field, params.prop_speed).seconds <= straight + 1e-9);
}

TEST_CASE("plan_path reports its best candidate when boxed in") {
    CurrentField field;
    std::vector<Circle> obstacles{{{500.0, 0.0}, 3000.0}};  // covers the whole search box
    PathPlannerParams params;
    try {
        plan_path({0.0, 0.0}, {1000.0, 0.0}, field, obstacles, params, 3);
        FAIL("expected PathPlanningError");
    } catch (const PathPlanningError& e) {
        CHECK(e.breakdown.collision > 0.0);
        CHECK(e.best_candidate.waypoints.size() >= 2);
    }
}

TEST_CASE("plan_path is deterministic per seed") {
    CurrentField field;
    field.vortexes.push_back({{700.0, 200.0}, 120.0, 250.0});
    std::vector<Circle> obstacles{{{900.0, -100.0}, 150.0}};
    PathPlannerParams params;
    Path a = plan_path({0.0, 0.0}, {1500.0, 300.0}, field, obstacles, params, 17);
    Path b = plan_path({0.0, 0.0}, {1500.0, 300.0}, field, obstacles, params, 17);
    REQUIRE(a.waypoints.size() == b.waypoints.size());
    for (std::size_t i = 0; i < a.waypoints.size(); ++i) CHECK(a.waypoints[i] == b.waypoints[i]);
}
