#include "cbfnav/apf.hpp"

#include <chrono>
#include <cmath>

#include "cbfnav/clf_cbf.hpp"

namespace cbfnav {

namespace {

struct Surface {
    double rho;   // distance to the obstacle surface
    Vec2 grad;    // unit vector away from the surface
};

Surface disk_surface(Vec2 p, const Disk& d) {
    const Vec2 diff = p - d.center;
    const double dist = norm(diff);
    if (dist <= d.radius) throw InsideObstacle("apf: position inside obstacle disk");
    const double inv = 1.0 / dist;
    return {dist - d.radius, {diff.x * inv, diff.y * inv}};
}

Surface rect_surface(Vec2 p, const ObstacleRect& r) {
    const double sd = rect_signed_distance(p, r);
    if (sd <= 0.0) throw InsideObstacle("apf: position inside obstacle rectangle");
    const Vec2 cp = rect_closest_point(p, r);
    const Vec2 diff = p - cp;
    const double dist = norm(diff);
    return {sd, {diff.x / dist, diff.y / dist}};
}

Vec2 repulsion(const Surface& s, const ApfParams& p) {
    if (s.rho >= p.rho0) return {0.0, 0.0};
    const double mag = p.k_rep * (1.0 / s.rho - 1.0 / p.rho0) / (s.rho * s.rho);
    return mag * s.grad;
}

double repulsion_potential(const Surface& s, const ApfParams& p) {
    if (s.rho >= p.rho0) return 0.0;
    const double t = 1.0 / s.rho - 1.0 / p.rho0;
    return 0.5 * p.k_rep * t * t;
}

}  // namespace

Vec2 apf_force(Vec2 position, Vec2 target, const std::vector<Disk>& obstacles,
               const ApfParams& params) {
    Vec2 f = -params.k_att * (position - target);
    for (const auto& d : obstacles) f = f + repulsion(disk_surface(position, d), params);
    return f;
}

Vec2 apf_force_rects(Vec2 position, Vec2 target,
                     const std::vector<ObstacleRect>& rects, const ApfParams& params) {
    Vec2 f = -params.k_att * (position - target);
    for (const auto& r : rects) f = f + repulsion(rect_surface(position, r), params);
    return f;
}

double apf_potential(Vec2 position, Vec2 target, const std::vector<Disk>& obstacles,
                     const ApfParams& params) {
    double u = 0.5 * params.k_att * dot(position - target, position - target);
    for (const auto& d : obstacles)
        u += repulsion_potential(disk_surface(position, d), params);
    return u;
}

double apf_potential_rects(Vec2 position, Vec2 target,
                           const std::vector<ObstacleRect>& rects,
                           const ApfParams& params) {
    double u = 0.5 * params.k_att * dot(position - target, position - target);
    for (const auto& r : rects)
        u += repulsion_potential(rect_surface(position, r), params);
    return u;
}

Trajectory apf_plan(const Scenario& scenario, double dt, int max_steps) {
    using clock = std::chrono::steady_clock;
    const ApfParams& params = scenario.apf;
    const ControllerParams& ctrl = scenario.controller;
    const std::vector<ObstacleRect> rects = scenario.all_rects();
    const std::vector<Disk> disks = cbf_disks(scenario);
    const Vec2 goal = scenario.target.position();

    Trajectory traj;
    Pose2D state = scenario.start;
    int slow_streak = 0;
    for (int k = 0;; ++k) {
        const double h = min_cbf_value(state, disks, scenario.safe_radius, 0.0);
        const double err = norm(state.position() - goal);
        if (err < scenario.sim.capture_radius) {
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::Reached;
            return traj;
        }
        if (k >= max_steps) {
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::TimedOut;
            return traj;
        }

        Twist u{0.0, 0.0};
        const auto t0 = clock::now();
        try {
            const Vec2 f = apf_force_rects(state.position(), goal, rects, params);
            const double bearing = std::atan2(f.y, f.x);
            const double herr = wrap_angle(bearing - state.theta);
            u.omega = std::clamp(params.heading_gain * herr, ctrl.u_min.omega,
                                 ctrl.u_max.omega);
            // Forward speed follows the force magnitude projected onto the
            // heading; the unicycle cannot move sideways and racing forward
            // against the field would drive it into obstacles.
            u.v = std::clamp(params.step_gain * norm(f) * std::max(0.0, std::cos(herr)),
                             ctrl.u_min.v, ctrl.u_max.v);
        } catch (const InsideObstacle&) {
            traj.planning_seconds +=
                std::chrono::duration<double>(clock::now() - t0).count();
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::Diverged;
            return traj;
        }
        traj.planning_seconds += std::chrono::duration<double>(clock::now() - t0).count();

        slow_streak = (u.v < 1e-3) ? slow_streak + 1 : 0;
        if (slow_streak >= 100) {
            traj.samples.push_back({k * dt, state, u, h});
            traj.termination = Termination::LocalMinimum;
            return traj;
        }

        traj.samples.push_back({k * dt, state, u, h});
        state = integrate(state, u, dt);
    }
}

}  // namespace cbfnav
