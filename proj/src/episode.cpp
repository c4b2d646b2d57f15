#include <chrono>

#include "cbfnav/apf.hpp"
#include "cbfnav/sim.hpp"
#include "cbfnav/voronoi_planner.hpp"

namespace cbfnav {

std::pair<Trajectory, Metrics> run_episode(const Scenario& scenario,
                                           PlannerKind planner, double dt,
                                           int max_steps) {
    validate_scenario(scenario);
    Trajectory traj;
    switch (planner) {
        case PlannerKind::ClfCbf:
            traj = run_clf_cbf_episode(scenario, dt, max_steps);
            break;
        case PlannerKind::Apf:
            traj = apf_plan(scenario, dt, max_steps);
            break;
        case PlannerKind::Voronoi: {
            using clock = std::chrono::steady_clock;
            const auto t0 = clock::now();
            const std::vector<Vec2> path = voronoi_plan(scenario);
            const double plan_time =
                std::chrono::duration<double>(clock::now() - t0).count();
            traj = follow_path(path, scenario, dt);
            traj.planning_seconds += plan_time;
            break;
        }
    }
    Metrics metrics = compute_metrics(traj, scenario);
    return {std::move(traj), metrics};
}

}  // namespace cbfnav
