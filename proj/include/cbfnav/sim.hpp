#pragma once

#include <string>
#include <vector>

#include "cbfnav/scenario.hpp"

namespace cbfnav {

// 4th-order Runge-Kutta advance of the unicycle kinematics
//   xdot = v cos(theta), ydot = v sin(theta), thetadot = omega
// under a zero-order-hold control. theta is re-wrapped.
Pose2D integrate(const Pose2D& state, const Twist& twist, double dt);

enum class Termination { Reached, TimedOut, QPInfeasible, LocalMinimum, Diverged };

const char* to_string(Termination t);

struct TrajectorySample {
    double t = 0.0;
    Pose2D pose;
    Twist twist;      // control applied over [t, t + dt)
    double min_h = 0.0;  // smallest barrier value over all obstacle disks
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination termination = Termination::TimedOut;
    double planning_seconds = 0.0;  // time spent inside planner calls
    int safety_stops = 0;           // steps replaced by Twist{0,0} to keep h >= 0
};

struct Metrics {
    double path_length = 0.0;
    double min_barrier = 0.0;
    double max_domega = 0.0;  // max |omega_k - omega_{k-1}| over consecutive samples
    int steps = 0;
    double wall_time = 0.0;  // planner computation only
    bool success = false;
};

Metrics compute_metrics(const Trajectory& trajectory, const Scenario& scenario);

enum class PlannerKind { ClfCbf, Apf, Voronoi };

const char* to_string(PlannerKind k);

// Parses "clf-cbf", "apf" or "voronoi"; throws std::invalid_argument otherwise.
PlannerKind planner_from_string(const std::string& name);

// Episode loop for the CLF-CBF planner: plan, integrate, record. A step whose
// integrated successor would dip any barrier below zero is replaced by a full
// stop, which leaves the state (and hence every h) unchanged.
Trajectory run_clf_cbf_episode(const Scenario& scenario, double dt, int max_steps);

// Runs one episode with the chosen planner and computes metrics.
// Planner-level failures (e.g. a disconnected roadmap) propagate as
// exceptions; in-episode failures land in Trajectory::termination.
std::pair<Trajectory, Metrics> run_episode(const Scenario& scenario,
                                           PlannerKind planner, double dt,
                                           int max_steps);

}  // namespace cbfnav
