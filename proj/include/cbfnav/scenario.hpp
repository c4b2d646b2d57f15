#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "cbfnav/geometry.hpp"

namespace cbfnav {

// Lyapunov-function weights. P has the five-parameter symmetric structure
//   [ p1  0   p2 ]
//   [ 0   p3  p4 ]
//   [ p2  p4  p5 ]
// and must be positive definite.
struct ClfParams {
    double p1 = 1.0;
    double p2 = 0.0;
    double p3 = 1.0;
    double p4 = 0.0;
    double p5 = 0.2;
    double lambda = 1.0;  // class-K gain, K(V) = lambda * V

    Eigen::Matrix3d matrix() const;
    void validate() const;  // throws std::invalid_argument on failure
};

// Barrier-function parameters. The barrier is evaluated at a point
// `lookahead` metres ahead of the axle so that omega enters its derivative.
struct CbfParams {
    double gamma = 1.0;      // class-K-infinity gain, alpha(h) = gamma * h
    double lookahead = 0.15; // metres, must be > 0 for a usable omega column

    void validate() const;
};

struct ControllerParams {
    ClfParams clf;
    CbfParams cbf;
    Eigen::Matrix2d input_cost = Eigen::Matrix2d::Identity();        // H
    Eigen::Matrix2d smoothness_cost = 0.5 * Eigen::Matrix2d::Identity();  // Q
    // Weight on the CLF slack. Large enough that the decrease condition is
    // honoured whenever feasible; pushing it much higher makes the slack
    // term drown the smoothness cost and the turn rate chatters between
    // adjacent barrier rows.
    double relaxation_weight = 10.0;
    Twist u_min{0.0, -1.2};
    Twist u_max{1.0, 1.2};
    // Track the target heading only inside this radius (kept at the capture
    // radius: a larger switch zone freezes a stale heading reference and can
    // wedge the final approach against an obstacle disk).
    double heading_switch_radius = 0.1;

    void validate() const;
};

struct ApfParams {
    double k_att = 1.0;
    // Repulsion kept short-range: with rho0 at half the inter-obstacle gap
    // the corridor centres stay influence-free and all benchmark targets
    // are reachable.
    double k_rep = 0.2;
    double rho0 = 0.5;        // repulsion influence radius, metres
    double step_gain = 1.0;   // maps force magnitude to forward speed
    double heading_gain = 2.0;

    void validate() const;
};

struct VoronoiParams {
    double sample_spacing = 0.1;    // boundary sampling resolution, metres
    double pursuit_lookahead = 0.3; // path tracker carrot distance, metres

    void validate() const;
};

struct SimParams {
    double dt = 0.05;
    double capture_radius = 0.1;
    int max_steps = 4000;

    void validate() const;
};

// Full planning scenario: room, obstacles, endpoints, and all planner
// parameters. Walls are four thin rectangles derived from the room bounds
// so the barrier machinery covers the boundary with the same mechanism.
struct Scenario {
    Vec2 room_min{-5.0, -5.0};
    Vec2 room_max{5.0, 5.0};
    std::vector<ObstacleRect> obstacles;
    std::vector<ObstacleRect> walls;
    Pose2D start;
    Pose2D target;
    std::vector<Pose2D> targets;  // configured target points; `target` is the active one
    // When the file pins no start heading, selecting a target re-aims the
    // start along the start-to-target bearing.
    bool start_theta_from_bearing = true;
    double safe_radius = 0.2;     // r_s

    ControllerParams controller;
    ApfParams apf;
    VoronoiParams voronoi;
    SimParams sim;

    bool inside_room(Vec2 p) const {
        return p.x >= room_min.x && p.x <= room_max.x && p.y >= room_min.y &&
               p.y <= room_max.y;
    }
    // All rectangles a trajectory must avoid: obstacles plus walls.
    std::vector<ObstacleRect> all_rects() const;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rebuilds the wall rectangles from the room bounds.
std::vector<ObstacleRect> make_walls(Vec2 room_min, Vec2 room_max,
                                     double thickness = 0.1);

// Converts scenario geometry into the disks used by the barrier rows:
// obstacles through their minimal enclosing circle, walls through a large
// disk tangent to the inner face (a room-long rectangle's enclosing circle
// would cover the whole room).
std::vector<Disk> cbf_disks(const Scenario& scenario);

// Checks geometric invariants: start and targets inside the room, start
// clear of every inflated disk. Throws ValidationError.
void validate_scenario(const Scenario& scenario);

}  // namespace cbfnav
