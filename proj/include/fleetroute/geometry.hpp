#ifndef FLEETROUTE_GEOMETRY_HPP
#define FLEETROUTE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>

namespace fleetroute {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

inline Vec2 normalized(const Vec2& a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

/// Counter-clockwise perpendicular.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

struct Circle {
    Vec2 center;
    double radius = 0.0;

    bool contains(const Vec2& p) const { return distance(center, p) <= radius; }
};

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
};

/// Distance from point p to segment ab.
inline double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    Vec2 ab = b - a;
    double len2 = norm2(ab);
    if (len2 == 0.0) return distance(a, p);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(a + ab * t, p);
}

inline bool segment_hits_circle(const Vec2& a, const Vec2& b, const Circle& c) {
    return segment_point_distance(a, b, c.center) < c.radius;
}

/// Interior angle between consecutive segments ab and bc, in [0, pi].
/// 0 means the path continues straight.
inline double turn_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 u = normalized(b - a);
    Vec2 v = normalized(c - b);
    double d = std::clamp(dot(u, v), -1.0, 1.0);
    return std::acos(d);
}

}  // namespace fleetroute

#endif
