#pragma once

#include <string>
#include <vector>

#include "cbfnav/scenario.hpp"
#include "cbfnav/sim.hpp"

namespace cbfnav {

// Scene overlay as SVG: room outline, obstacle rectangles in red, their
// enclosing disks translucent, walls grey, one <path> polyline per
// trajectory, start and target markers.
std::string scenario_svg(const Scenario& scenario,
                         const std::vector<Trajectory>& trajectories);

}  // namespace cbfnav
