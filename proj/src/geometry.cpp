#include "cbfnav/geometry.hpp"

#include <algorithm>

namespace cbfnav {

double wrap_angle(double a) {
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    return r - kPi;
}

Pose2D Pose2D::make(double x, double y, double theta) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta))
        throw std::invalid_argument("Pose2D: non-finite component");
    return Pose2D{x, y, wrap_angle(theta)};
}

Disk enclosing_disk(const ObstacleRect& rect) {
    if (rect.length < 0.0 || rect.width < 0.0)
        throw InvalidObstacle("enclosing_disk: negative side length");
    if (rect.length == 0.0 && rect.width == 0.0)
        throw InvalidObstacle("enclosing_disk: degenerate rectangle (l = w = 0)");
    const double r = std::hypot(0.5 * rect.length, 0.5 * rect.width);
    return Disk{rect.center, r};
}

ErrorVec pose_error(const Pose2D& current, const Pose2D& target) {
    return ErrorVec{current.x - target.x, current.y - target.y,
                    wrap_angle(current.theta - target.theta)};
}

double rect_signed_distance(Vec2 p, const ObstacleRect& rect) {
    const double hx = 0.5 * rect.length;
    const double hy = 0.5 * rect.width;
    const double dx = std::fabs(p.x - rect.center.x) - hx;
    const double dy = std::fabs(p.y - rect.center.y) - hy;
    if (dx > 0.0 || dy > 0.0)
        return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    return std::max(dx, dy);  // inside: negative
}

Vec2 rect_closest_point(Vec2 p, const ObstacleRect& rect) {
    const double hx = 0.5 * rect.length;
    const double hy = 0.5 * rect.width;
    const double cx = std::clamp(p.x, rect.center.x - hx, rect.center.x + hx);
    const double cy = std::clamp(p.y, rect.center.y - hy, rect.center.y + hy);
    if (cx != p.x || cy != p.y) return {cx, cy};
    // Inside: project to the nearest face.
    const double dxl = p.x - (rect.center.x - hx);
    const double dxr = (rect.center.x + hx) - p.x;
    const double dyb = p.y - (rect.center.y - hy);
    const double dyt = (rect.center.y + hy) - p.y;
    const double m = std::min({dxl, dxr, dyb, dyt});
    if (m == dxl) return {rect.center.x - hx, p.y};
    if (m == dxr) return {rect.center.x + hx, p.y};
    if (m == dyb) return {p.x, rect.center.y - hy};
    return {p.x, rect.center.y + hy};
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto cross = [](Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; };
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return false;
}

}  // namespace

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    if (segments_intersect(a0, a1, b0, b1)) return 0.0;
    return std::min({point_segment_distance(a0, b0, b1),
                     point_segment_distance(a1, b0, b1),
                     point_segment_distance(b0, a0, a1),
                     point_segment_distance(b1, a0, a1)});
}

double segment_rect_distance(Vec2 a, Vec2 b, const ObstacleRect& rect) {
    // An endpoint inside the rectangle means contact.
    if (rect_signed_distance(a, rect) <= 0.0 || rect_signed_distance(b, rect) <= 0.0)
        return 0.0;
    const double hx = 0.5 * rect.length;
    const double hy = 0.5 * rect.width;
    const Vec2 c = rect.center;
    const Vec2 v0{c.x - hx, c.y - hy};
    const Vec2 v1{c.x + hx, c.y - hy};
    const Vec2 v2{c.x + hx, c.y + hy};
    const Vec2 v3{c.x - hx, c.y + hy};
    return std::min({segment_segment_distance(a, b, v0, v1),
                     segment_segment_distance(a, b, v1, v2),
                     segment_segment_distance(a, b, v2, v3),
                     segment_segment_distance(a, b, v3, v0)});
}

}  // namespace cbfnav
