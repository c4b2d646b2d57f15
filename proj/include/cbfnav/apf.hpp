#pragma once

#include <stdexcept>
#include <vector>

#include "cbfnav/sim.hpp"

namespace cbfnav {

struct InsideObstacle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Attractive-plus-repulsive force at `position`:
//   F = -k_att (position - target)
//     + sum over obstacles with surface distance rho < rho0 of
//         k_rep (1/rho - 1/rho0) (1/rho^2) grad_rho.
// Throws InsideObstacle when the position lies inside an obstacle.
Vec2 apf_force(Vec2 position, Vec2 target, const std::vector<Disk>& obstacles,
               const ApfParams& params);

// Same field over the true rectangle geometry; the planner uses this form.
Vec2 apf_force_rects(Vec2 position, Vec2 target,
                     const std::vector<ObstacleRect>& rects, const ApfParams& params);

// The underlying potentials, exposed so the force can be checked as their
// exact negative gradient.
double apf_potential(Vec2 position, Vec2 target, const std::vector<Disk>& obstacles,
                     const ApfParams& params);
double apf_potential_rects(Vec2 position, Vec2 target,
                           const std::vector<ObstacleRect>& rects,
                           const ApfParams& params);

// Gradient-following episode: omega tracks the force bearing, v follows the
// force magnitude, both clamped to the shared input bounds. Terminates at
// the capture radius, on LocalMinimum (speed < 1e-3 m/s for 100 consecutive
// steps away from the target), or TimedOut.
Trajectory apf_plan(const Scenario& scenario, double dt, int max_steps);

}  // namespace cbfnav
