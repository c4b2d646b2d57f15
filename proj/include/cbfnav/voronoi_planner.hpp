#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "cbfnav/sim.hpp"

namespace cbfnav {

struct NoPathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoadmapEdge {
    int a = 0;
    int b = 0;
    double length = 0.0;
    double clearance = 0.0;  // min distance to the true rectangle geometry
    int site_a = 0;          // generating boundary-sample sites
    int site_b = 0;
};

struct RoadmapGraph {
    std::vector<Vec2> vertices;
    std::vector<RoadmapEdge> edges;
    std::vector<Vec2> sites;
};

// Samples obstacle and wall boundaries, builds the Voronoi diagram of the
// samples, and keeps the finite edges that stay inside the room with
// clearance >= r_s against the true rectangles.
RoadmapGraph build_roadmap(const Scenario& scenario);

// Minimum distance from each segment to the rectangle set. The OpenMP
// version writes one slot per segment, so its output is bit-identical to
// the serial reference regardless of thread count.
std::vector<double> segment_clearances(
    const std::vector<std::pair<Vec2, Vec2>>& segments,
    const std::vector<ObstacleRect>& rects);
std::vector<double> segment_clearances_serial(
    const std::vector<std::pair<Vec2, Vec2>>& segments,
    const std::vector<ObstacleRect>& rects);

// Shortest roadmap path from start to target by edge length, with both
// endpoints connected to their nearest reachable roadmap vertices.
// Throws NoPathError when the components are disconnected.
std::vector<Vec2> voronoi_plan(const Scenario& scenario);

// Pure-pursuit tracking of a polyline with a fixed look-ahead. Terminates at
// the capture radius of the final point; Diverged when the cross-track error
// exceeds 1 m. The path must have at least two points.
Trajectory follow_path(const std::vector<Vec2>& path, const Scenario& scenario,
                       double dt);

}  // namespace cbfnav
