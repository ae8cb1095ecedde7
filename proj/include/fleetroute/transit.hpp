#ifndef FLEETROUTE_TRANSIT_HPP
#define FLEETROUTE_TRANSIT_HPP

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetroute/field.hpp"
#include "fleetroute/geometry.hpp"
#include "fleetroute/random.hpp"

namespace fleetroute {

/// Waypoint path between two nodes. p_0 is the source position and p_n the
/// target position; no segment may intersect an obstacle disk.
struct Path {
    std::vector<Vec2> waypoints;
    int source_id = -1;
    int target_id = -1;

    double length() const {
        double s = 0.0;
        for (std::size_t i = 1; i < waypoints.size(); ++i)
            s += distance(waypoints[i - 1], waypoints[i]);
        return s;
    }
};

/// Along-track ground speed when holding the given unit tangent through the
/// local current with a fixed propulsion speed. The cross-track current
/// component must be cancelled by propulsion; if it exceeds the propulsion
/// speed, or the resulting along-track speed is non-positive, the segment
/// cannot be traversed on-track and nullopt is returned.
inline std::optional<double> ground_speed(const Vec2& tangent, const Vec2& current,
                                          double prop_speed) {
    double along = dot(current, tangent);
    double cross2 = norm2(current) - along * along;
    double radicand = prop_speed * prop_speed - std::max(0.0, cross2);
    if (radicand < 0.0) return std::nullopt;
    double speed = along + std::sqrt(radicand);
    if (speed <= 0.0) return std::nullopt;
    return speed;
}

struct PathTime {
    double seconds = 0.0;
    bool feasible = true;
    int infeasible_segments = 0;
};

/// Traversal time of a waypoint path: per-segment length over ground speed,
/// current sampled at the segment midpoint. Any infeasible segment flips the
/// flag and the total becomes +inf.
inline PathTime path_time(const std::vector<Vec2>& waypoints, const CurrentField& field,
                          double prop_speed) {
    PathTime result;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        Vec2 a = waypoints[i - 1];
        Vec2 b = waypoints[i];
        double len = distance(a, b);
        if (len == 0.0) continue;
        Vec2 tangent = (b - a) / len;
        Vec2 current = field_velocity((a + b) / 2.0, field);
        auto speed = ground_speed(tangent, current, prop_speed);
        if (!speed) {
            result.feasible = false;
            result.infeasible_segments++;
        } else {
            result.seconds += len / *speed;
        }
    }
    if (!result.feasible) result.seconds = std::numeric_limits<double>::infinity();
    return result;
}

inline PathTime path_time(const Path& path, const CurrentField& field, double prop_speed) {
    return path_time(path.waypoints, field, prop_speed);
}

/// Resamples a control polyline into n equal-arclength segments (n+1 points).
inline std::vector<Vec2> resample_polyline(const std::vector<Vec2>& control, int n) {
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < control.size(); ++i)
        cum.push_back(cum.back() + distance(control[i - 1], control[i]));
    double total = cum.back();
    std::vector<Vec2> out;
    out.reserve(n + 1);
    std::size_t seg = 1;
    for (int k = 0; k <= n; ++k) {
        double target = total * k / n;
        while (seg + 1 < control.size() && cum[seg] < target) ++seg;
        double seg_len = cum[seg] - cum[seg - 1];
        double t = seg_len > 0 ? (target - cum[seg - 1]) / seg_len : 0.0;
        out.push_back(control[seg - 1] + (control[seg] - control[seg - 1]) * t);
    }
    return out;
}

struct PathPlannerParams {
    int control_point_count = 3;   // free points between the endpoints
    int discretization = 50;       // waypoint segments, >= control_point_count
    double max_turn_angle = M_PI / 4.0;
    int population = 40;
    int iterations = 150;
    double prop_speed = 1.0;
    double collision_weight = 10.0;    // seconds per meter of penetration
    double turn_weight = 2000.0;       // seconds per rad^2 of excess turn
    double infeasible_weight = 1e6;    // seconds per untraversable segment
};

struct PathPenalties {
    double time = 0.0;
    double collision = 0.0;
    double turn = 0.0;
    int infeasible_segments = 0;

    double total(const PathPlannerParams& p) const {
        return time + p.collision_weight * collision + p.turn_weight * turn +
               p.infeasible_weight * infeasible_segments;
    }
    bool clean() const { return collision == 0.0 && turn == 0.0 && infeasible_segments == 0; }
};

class PathPlanningError : public std::runtime_error {
  public:
    PathPlanningError(const std::string& msg, Path best, PathPenalties penalties)
        : std::runtime_error(msg), best_candidate(std::move(best)), breakdown(penalties) {}

    Path best_candidate;
    PathPenalties breakdown;
};

namespace detail {

inline PathPenalties evaluate_path(const std::vector<Vec2>& waypoints,
                                   const CurrentField& field,
                                   const std::vector<Circle>& obstacles,
                                   const PathPlannerParams& params) {
    PathPenalties pen;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        Vec2 a = waypoints[i - 1];
        Vec2 b = waypoints[i];
        double len = distance(a, b);
        if (len == 0.0) continue;
        for (const auto& obs : obstacles) {
            double d = segment_point_distance(a, b, obs.center);
            if (d < obs.radius) pen.collision += obs.radius - d;
        }
        if (i >= 2) {
            double angle = turn_angle(waypoints[i - 2], a, b);
            if (angle > params.max_turn_angle) {
                double excess = angle - params.max_turn_angle;
                pen.turn += excess * excess;
            }
        }
        Vec2 tangent = (b - a) / len;
        Vec2 current = field_velocity((a + b) / 2.0, field);
        auto speed = ground_speed(tangent, current, params.prop_speed);
        if (!speed) {
            pen.infeasible_segments++;
            pen.time += len / (0.05 * params.prop_speed);
        } else {
            pen.time += len / *speed;
        }
    }
    return pen;
}

}  // namespace detail

/// Plans a time-optimal obstacle-free path from a to b through the current
/// field with a differential-evolution search over control-point coordinates.
/// Deterministic per seed. If the straight segment is itself clean and not
/// slower than the evolved candidate, the straight segment is returned.
inline Path plan_path(const Vec2& a, const Vec2& b, const CurrentField& field,
                      const std::vector<Circle>& obstacles,
                      const PathPlannerParams& params, std::uint64_t seed) {
    const int k = params.control_point_count;
    const int dim = 2 * k;
    const int n = params.discretization;
    Rng rng = make_rng(seed);

    // Search box: chord bounding box grown by half the chord length.
    double margin = 0.5 * distance(a, b) + 1.0;
    Rect box{std::min(a.x, b.x) - margin, std::min(a.y, b.y) - margin,
             std::max(a.x, b.x) + margin, std::max(a.y, b.y) + margin};
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax);
    std::uniform_real_distribution<double> uy(box.ymin, box.ymax);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, params.population - 1);

    auto decode = [&](const std::vector<double>& genome) {
        std::vector<Vec2> control;
        control.push_back(a);
        for (int i = 0; i < k; ++i) control.push_back({genome[2 * i], genome[2 * i + 1]});
        control.push_back(b);
        return resample_polyline(control, n);
    };
    auto fitness = [&](const std::vector<double>& genome) {
        return detail::evaluate_path(decode(genome), field, obstacles, params).total(params);
    };

    std::vector<std::vector<double>> pop(params.population, std::vector<double>(dim));
    std::vector<double> score(params.population);
    for (int i = 0; i < k; ++i) {  // straight-chord individual
        Vec2 p = a + (b - a) * ((i + 1.0) / (k + 1.0));
        pop[0][2 * i] = p.x;
        pop[0][2 * i + 1] = p.y;
    }
    for (int m = 1; m < params.population; ++m)
        for (int i = 0; i < k; ++i) {
            pop[m][2 * i] = ux(rng);
            pop[m][2 * i + 1] = uy(rng);
        }
    for (int m = 0; m < params.population; ++m) score[m] = fitness(pop[m]);

    const double F = 0.7, CR = 0.9;
    for (int it = 0; it < params.iterations; ++it) {
        for (int m = 0; m < params.population; ++m) {
            int r1 = pick(rng), r2 = pick(rng), r3 = pick(rng);
            std::vector<double> trial = pop[m];
            int jrand = static_cast<int>(unit(rng) * dim) % dim;
            for (int j = 0; j < dim; ++j) {
                if (unit(rng) < CR || j == jrand)
                    trial[j] = pop[r1][j] + F * (pop[r2][j] - pop[r3][j]);
            }
            double s = fitness(trial);
            if (s <= score[m]) {
                pop[m] = std::move(trial);
                score[m] = s;
            }
        }
    }

    int best = 0;
    for (int m = 1; m < params.population; ++m)
        if (score[m] < score[best]) best = m;
    std::vector<Vec2> best_wp = decode(pop[best]);
    PathPenalties best_pen = detail::evaluate_path(best_wp, field, obstacles, params);

    std::vector<Vec2> straight = resample_polyline({a, b}, n);
    PathPenalties straight_pen = detail::evaluate_path(straight, field, obstacles, params);

    Path path;
    if (straight_pen.clean() && (!best_pen.clean() || straight_pen.time <= best_pen.time)) {
        path.waypoints = std::move(straight);
    } else if (best_pen.clean()) {
        path.waypoints = std::move(best_wp);
    } else {
        Path candidate;
        candidate.waypoints = std::move(best_wp);
        throw PathPlanningError("no feasible path found within budget", std::move(candidate),
                                best_pen);
    }
    return path;
}

}  // namespace fleetroute

#endif
