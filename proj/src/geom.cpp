#include "torusdyn/geom.hpp"

#include <limits>

namespace torusdyn {

namespace {

// Lift the polyline to a continuous curve near its first vertex.
std::vector<Vec2> lift_polyline(const std::vector<Vec2>& poly) {
    std::vector<Vec2> lifted;
    lifted.reserve(poly.size());
    Vec2 prev = poly.front();
    lifted.push_back(prev);
    for (size_t i = 1; i < poly.size(); ++i) {
        Vec2 step = torus_diff(poly[i], prev);
        prev = lifted.back() + step;
        lifted.push_back(prev);
    }
    return lifted;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        double v = cross(b - a, c - a);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    if (o1 == 0 && on_seg(p1, p2, q1)) return true;
    if (o2 == 0 && on_seg(p1, p2, q2)) return true;
    if (o3 == 0 && on_seg(q1, q2, p1)) return true;
    if (o4 == 0 && on_seg(q1, q2, p2)) return true;
    return false;
}

}  // namespace

Box2 bounding_box(const std::vector<Vec2>& pts) {
    if (pts.empty()) throw std::invalid_argument("bounding_box: empty point set");
    std::vector<Vec2> lifted = lift_polyline(pts);
    double xlo = lifted[0].x, xhi = lifted[0].x, ylo = lifted[0].y, yhi = lifted[0].y;
    for (const Vec2& p : lifted) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    Box2 box;
    box.center = torus_rep({0.5 * (xlo + xhi), 0.5 * (ylo + yhi)});
    box.half = {0.5 * (xhi - xlo), 0.5 * (yhi - ylo)};
    return box;
}

double sampled_diameter(const std::vector<Vec2>& pts) {
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, torus_dist(pts[i], pts[j]));
    return d;
}

double dist_to_closed_polyline(const Vec2& z, const std::vector<Vec2>& poly) {
    std::vector<Vec2> lifted = lift_polyline(poly);
    // place z in the lift nearest the polyline's first vertex
    Vec2 zl = lifted.front() + torus_diff(z, poly.front());
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lifted.size(); ++i) {
        const Vec2& a = lifted[i];
        const Vec2& b = lifted[(i + 1) % lifted.size()];
        best = std::min(best, dist_point_segment(zl, a, b));
    }
    return best;
}

bool closed_polylines_disjoint(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    std::vector<Vec2> la = lift_polyline(a);
    // lift b relative to a's frame
    std::vector<Vec2> lb;
    lb.reserve(b.size());
    Vec2 start = la.front() + torus_diff(b.front(), a.front());
    lb.push_back(start);
    for (size_t i = 1; i < b.size(); ++i)
        lb.push_back(lb.back() + torus_diff(b[i], b[i - 1]));

    for (size_t i = 0; i < la.size(); ++i) {
        Vec2 a1 = la[i], a2 = la[(i + 1) % la.size()];
        for (size_t j = 0; j < lb.size(); ++j) {
            Vec2 b1 = lb[j], b2 = lb[(j + 1) % lb.size()];
            if (segments_intersect(a1, a2, b1, b2)) return false;
        }
    }
    // containment: either curve's first vertex inside the other
    if (point_in_closed_polyline(b.front(), a)) return false;
    if (point_in_closed_polyline(a.front(), b)) return false;
    return true;
}

bool polyline_is_simple(const std::vector<Vec2>& poly) {
    std::vector<Vec2> l = lift_polyline(poly);
    size_t n = l.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a1 = l[i], a2 = l[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            // skip adjacent segments (shared endpoint)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Vec2 b1 = l[j], b2 = l[(j + 1) % n];
            if (segments_intersect(a1, a2, b1, b2)) return false;
        }
    }
    return true;
}

bool point_in_closed_polyline(const Vec2& z, const std::vector<Vec2>& poly) {
    std::vector<Vec2> l = lift_polyline(poly);
    Vec2 zl = l.front() + torus_diff(z, poly.front());
    // standard even-odd ray cast to +x
    bool inside = false;
    size_t n = l.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& pi = l[i];
        const Vec2& pj = l[j];
        if ((pi.y > zl.y) != (pj.y > zl.y)) {
            double xint = pj.x + (zl.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
            if (zl.x < xint) inside = !inside;
        }
    }
    return inside;
}

double sampled_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double worst = 0.0;
    for (const Vec2& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& q : b) best = std::min(best, torus_dist(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace torusdyn
