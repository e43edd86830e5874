#ifndef TORUSDYN_GEOM_HPP
#define TORUSDYN_GEOM_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace torusdyn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm_inf(const Vec2& a) { return std::max(std::abs(a.x), std::abs(a.y)); }

/// Fractional part in [0,1).
inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guards x = -1e-17 style rounding
    return f;
}

/// Canonical torus representative in [0,1)^2.
inline Vec2 torus_rep(const Vec2& z) { return {frac(z.x), frac(z.y)}; }

/// Signed circle difference in [-1/2, 1/2): shortest representative of a-b mod 1.
inline double circle_diff(double a, double b) {
    double d = a - b;
    d -= std::round(d);
    return d;
}

/// Distance on the circle R/Z.
inline double circle_dist(double a, double b) { return std::abs(circle_diff(a, b)); }

/// Shortest representative of z - w modulo Z^2.
inline Vec2 torus_diff(const Vec2& z, const Vec2& w) {
    return {circle_diff(z.x, w.x), circle_diff(z.y, w.y)};
}

/// Euclidean distance on the torus R^2/Z^2.
inline double torus_dist(const Vec2& z, const Vec2& w) { return norm(torus_diff(z, w)); }

/// Axis-aligned box stored as center + halfwidths; membership is tested through
/// torus_diff so tiny boxes never have to worry about wrap-around.
struct Box2 {
    Vec2 center;
    Vec2 half;

    bool contains_torus(const Vec2& z) const {
        Vec2 d = torus_diff(z, center);
        return std::abs(d.x) <= half.x && std::abs(d.y) <= half.y;
    }
    void inflate(double m) {
        half.x += m;
        half.y += m;
    }
    bool overlaps_torus(const Box2& o) const {
        Vec2 d = torus_diff(center, o.center);
        return std::abs(d.x) <= half.x + o.half.x && std::abs(d.y) <= half.y + o.half.y;
    }
};

/// Bounding box of a point cloud given as torus points close to a common center.
Box2 bounding_box(const std::vector<Vec2>& pts);

/// Max pairwise torus distance over a sample cloud.
double sampled_diameter(const std::vector<Vec2>& pts);

/// Distance from a point to a closed polyline (consecutive points joined by
/// segments, last joined to first), all in torus metric. The polyline is
/// assumed small enough that its lifted representatives around `z` are unambiguous.
double dist_to_closed_polyline(const Vec2& z, const std::vector<Vec2>& poly);

/// True if two closed polylines (plus interiors) are disjoint: no segment pair
/// intersects and neither contains the other's base point.
bool closed_polylines_disjoint(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// True if the closed polyline has no self-intersections among non-adjacent segments.
bool polyline_is_simple(const std::vector<Vec2>& poly);

/// Winding-number test: is z inside the closed polyline? Uses lifted coordinates
/// relative to the polyline's first vertex.
bool point_in_closed_polyline(const Vec2& z, const std::vector<Vec2>& poly);

/// One-sided sampled Hausdorff distance: sup over a of min over b.
double sampled_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace torusdyn

#endif
