#include "cbfnav/sim.hpp"

#include <chrono>
#include <cmath>

#include "cbfnav/clf_cbf.hpp"

namespace cbfnav {

namespace {

struct Deriv {
    double dx, dy, dtheta;
};

Deriv unicycle(const Pose2D& s, const Twist& u) {
    return {u.v * std::cos(s.theta), u.v * std::sin(s.theta), u.omega};
}

}  // namespace

Pose2D integrate(const Pose2D& state, const Twist& twist, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    const Deriv k1 = unicycle(state, twist);
    const Pose2D s2{state.x + 0.5 * dt * k1.dx, state.y + 0.5 * dt * k1.dy,
                    state.theta + 0.5 * dt * k1.dtheta};
    const Deriv k2 = unicycle(s2, twist);
    const Pose2D s3{state.x + 0.5 * dt * k2.dx, state.y + 0.5 * dt * k2.dy,
                    state.theta + 0.5 * dt * k2.dtheta};
    const Deriv k3 = unicycle(s3, twist);
    const Pose2D s4{state.x + dt * k3.dx, state.y + dt * k3.dy,
                    state.theta + dt * k3.dtheta};
    const Deriv k4 = unicycle(s4, twist);
    Pose2D out;
    out.x = state.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.y = state.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    out.theta = wrap_angle(state.theta + dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta +
                                                     2.0 * k3.dtheta + k4.dtheta));
    return out;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Reached: return "Reached";
        case Termination::TimedOut: return "TimedOut";
        case Termination::QPInfeasible: return "QPInfeasible";
        case Termination::LocalMinimum: return "LocalMinimum";
        case Termination::Diverged: return "Diverged";
    }
    return "Unknown";
}

const char* to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::ClfCbf: return "clf-cbf";
        case PlannerKind::Apf: return "apf";
        case PlannerKind::Voronoi: return "voronoi";
    }
    return "unknown";
}

PlannerKind planner_from_string(const std::string& name) {
    if (name == "clf-cbf") return PlannerKind::ClfCbf;
    if (name == "apf") return PlannerKind::Apf;
    if (name == "voronoi") return PlannerKind::Voronoi;
    throw std::invalid_argument("unknown planner: " + name);
}

Metrics compute_metrics(const Trajectory& trajectory, const Scenario& scenario) {
    if (trajectory.samples.empty())
        throw std::invalid_argument("compute_metrics: empty trajectory");
    Metrics m;
    m.min_barrier = trajectory.samples.front().min_h;
    for (std::size_t i = 1; i < trajectory.samples.size(); ++i) {
        const auto& a = trajectory.samples[i - 1];
        const auto& b = trajectory.samples[i];
        m.path_length += std::hypot(b.pose.x - a.pose.x, b.pose.y - a.pose.y);
        m.max_domega = std::max(m.max_domega, std::fabs(b.twist.omega - a.twist.omega));
        m.min_barrier = std::min(m.min_barrier, b.min_h);
    }
    m.steps = static_cast<int>(trajectory.samples.size()) - 1;
    m.wall_time = trajectory.planning_seconds;
    const auto& last = trajectory.samples.back().pose;
    const double err = std::hypot(last.x - scenario.target.x, last.y - scenario.target.y);
    m.success = trajectory.termination == Termination::Reached &&
                err < scenario.sim.capture_radius;
    return m;
}

Trajectory run_clf_cbf_episode(const Scenario& scenario, double dt, int max_steps) {
    using clock = std::chrono::steady_clock;
    const std::vector<Disk> disks = cbf_disks(scenario);
    const double d = scenario.controller.cbf.lookahead;
    const double rs = scenario.safe_radius;
    ClfCbfController controller(scenario.controller, rs);

    Trajectory traj;
    Pose2D state = scenario.start;
    double t = 0.0;
    for (int k = 0;; ++k) {
        const double h = min_cbf_value(state, disks, rs, d);
        const double err =
            std::hypot(state.x - scenario.target.x, state.y - scenario.target.y);
        if (err < scenario.sim.capture_radius) {
            traj.samples.push_back({t, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::Reached;
            return traj;
        }
        if (k >= max_steps) {
            traj.samples.push_back({t, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::TimedOut;
            return traj;
        }

        const auto t0 = clock::now();
        const ControlStepResult step = controller.step(state, scenario.target, disks);
        traj.planning_seconds += std::chrono::duration<double>(clock::now() - t0).count();

        if (step.qp_infeasible) {
            traj.samples.push_back({t, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::QPInfeasible;
            return traj;
        }

        Twist u = step.u;
        Pose2D next = integrate(state, u, dt);
        if (min_cbf_value(next, disks, rs, d) < 0.0) {
            // The continuous-time rows do not cover the discrete step; stop
            // instead, which keeps the state and every barrier value as-is.
            u = Twist{0.0, 0.0};
            next = state;
            ++traj.safety_stops;
        }
        traj.samples.push_back({t, state, u, h});
        state = next;
        t = (k + 1) * dt;
    }
}

}  // namespace cbfnav
