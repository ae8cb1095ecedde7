#ifndef FLEETROUTE_FIELD_HPP
#define FLEETROUTE_FIELD_HPP

#include <cmath>
#include <vector>

#include "fleetroute/geometry.hpp"
#include "fleetroute/random.hpp"

namespace fleetroute {

/// A single Lamb vortex: rotational current with strength `strength` (m^2/s,
/// signed; positive spins counter-clockwise) and core radius `radius` (m).
struct LambVortex {
    Vec2 center;
    double strength = 0.0;  // Gamma
    double radius = 1.0;    // delta, > 0
};

struct CurrentField {
    std::vector<LambVortex> vortexes;
};

/// Velocity induced at `pos` by one vortex. The velocity is tangential:
/// magnitude Gamma/(2 pi d) * [1 - exp(-d^2/delta^2)] at distance d from the
/// center, which tends to 0 as d -> 0; below 1e-9 m the analytic limit (0,0)
/// is returned directly.
inline Vec2 vortex_velocity(const Vec2& pos, const LambVortex& v) {
    Vec2 r = pos - v.center;
    double d2 = norm2(r);
    if (d2 < 1e-18) return {0.0, 0.0};
    double factor = v.strength / (2.0 * M_PI * d2) *
                    (1.0 - std::exp(-d2 / (v.radius * v.radius)));
    return {-factor * r.y, factor * r.x};
}

/// Superposition of all vortex contributions; empty field gives (0,0).
inline Vec2 field_velocity(const Vec2& pos, const CurrentField& field) {
    Vec2 sum{0.0, 0.0};
    for (const auto& v : field.vortexes) sum = sum + vortex_velocity(pos, v);
    return sum;
}

/// Multiplicative / additive noise applied to vortex parameters when turning
/// the believed field into a "true" realization.
struct FieldPerturbation {
    double gamma_scale = 0.2;    // std of relative strength error
    double delta_scale = 0.1;    // std of relative radius error
    double center_jitter = 200;  // std of center offset, meters
};

/// Returns a perturbed copy of `field`, deterministic per seed. Zero scales
/// reproduce the input exactly.
inline CurrentField realize_true_field(const CurrentField& field,
                                       const FieldPerturbation& pert,
                                       std::uint64_t seed) {
    CurrentField out = field;
    Rng rng = make_rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (auto& v : out.vortexes) {
        double eg = pert.gamma_scale > 0 ? pert.gamma_scale * unit(rng) : 0.0;
        double ed = pert.delta_scale > 0 ? pert.delta_scale * unit(rng) : 0.0;
        Vec2 jitter{0.0, 0.0};
        if (pert.center_jitter > 0) {
            jitter.x = pert.center_jitter * unit(rng);
            jitter.y = pert.center_jitter * unit(rng);
        }
        v.strength *= 1.0 + eg;
        v.radius *= std::max(0.01, 1.0 + ed);  // keep delta > 0
        v.center = v.center + jitter;
    }
    return out;
}

}  // namespace fleetroute

#endif
