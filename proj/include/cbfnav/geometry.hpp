#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cbfnav {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Planar pose (x, y, heading). theta is kept in (-pi, pi].
struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    static Pose2D make(double x, double y, double theta);
    Vec2 position() const { return {x, y}; }
};

// Unicycle control input: forward speed v and turn rate omega.
struct Twist {
    double v = 0.0;
    double omega = 0.0;
};

// Error between a pose and a target pose; angle component wrapped.
struct ErrorVec {
    double ex = 0.0;
    double ey = 0.0;
    double etheta = 0.0;
};

// Axis-aligned rectangular obstacle. length spans x, width spans y.
struct ObstacleRect {
    Vec2 center;
    double length = 0.0;
    double width = 0.0;
};

// Circular obstacle proxy used by the barrier constraints.
struct Disk {
    Vec2 center;
    double radius = 0.0;
};

struct InvalidObstacle : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Minimal enclosing circle of a rectangle: r = sqrt((l/2)^2 + (w/2)^2).
// Throws InvalidObstacle for the fully degenerate l = w = 0 case.
Disk enclosing_disk(const ObstacleRect& rect);

// Componentwise difference current - target with the angle wrapped.
ErrorVec pose_error(const Pose2D& current, const Pose2D& target);

// Signed distance from a point to the rectangle boundary (negative inside)
// and the closest boundary point. Used by the baselines, which work on the
// true rectangle geometry.
double rect_signed_distance(Vec2 p, const ObstacleRect& rect);
Vec2 rect_closest_point(Vec2 p, const ObstacleRect& rect);

// Shortest distance between segment [a0,a1] and segment [b0,b1].
double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

// Shortest distance from segment [a,b] to the rectangle boundary.
// Zero when the segment touches or crosses the rectangle.
double segment_rect_distance(Vec2 a, Vec2 b, const ObstacleRect& rect);

}  // namespace cbfnav
