#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbfnav/scenario_io.hpp"
#include "cbfnav/voronoi_planner.hpp"

using namespace cbfnav;

namespace {

Scenario room_scenario(Vec2 start, Vec2 target, std::vector<ObstacleRect> obstacles) {
    Scenario sc;
    sc.room_min = {-5, -5};
    sc.room_max = {5, 5};
    sc.walls = make_walls(sc.room_min, sc.room_max);
    sc.obstacles = std::move(obstacles);
    const double bearing = std::atan2(target.y - start.y, target.x - start.x);
    sc.start = Pose2D::make(start.x, start.y, std::isfinite(bearing) ? bearing : 0.0);
    sc.targets = {Pose2D::make(target.x, target.y, 0)};
    sc.target = sc.targets[0];
    return sc;
}

double polyline_length(const std::vector<Vec2>& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += norm(path[i] - path[i - 1]);
    return len;
}

double brute_force_clearance(const std::vector<Vec2>& path, const Scenario& sc,
                             double step = 0.01) {
    double min_clear = std::numeric_limits<double>::infinity();
    const auto rects = sc.all_rects();
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double len = norm(path[i] - path[i - 1]);
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const Vec2 p = path[i - 1] + t * (path[i] - path[i - 1]);
            for (const auto& r : rects)
                min_clear = std::min(min_clear, rect_signed_distance(p, r));
        }
    }
    return min_clear;
}

}  // namespace

TEST_CASE("roadmap edges keep the clearance bound and OMP matches serial") {
    Scenario sc = parse_scenario(default_scenario_text());
    select_target(sc, 3);
    const RoadmapGraph graph = build_roadmap(sc);
    REQUIRE(!graph.edges.empty());
    std::vector<std::pair<Vec2, Vec2>> segments;
    for (const auto& e : graph.edges)
        segments.emplace_back(graph.vertices[e.a], graph.vertices[e.b]);
    const auto rects = sc.all_rects();
    const auto par = segment_clearances(segments, rects);
    const auto ser = segment_clearances_serial(segments, rects);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i] == ser[i]);  // bit-identical
        CHECK(graph.edges[i].clearance >= sc.safe_radius);
    }
}

TEST_CASE("roadmap edges are equidistant to their two generating sites") {
    Scenario sc = parse_scenario(default_scenario_text());
    select_target(sc, 3);
    const RoadmapGraph graph = build_roadmap(sc);
    for (const auto& e : graph.edges) {
        const Vec2 mid = 0.5 * (graph.vertices[e.a] + graph.vertices[e.b]);
        const double da = norm(mid - graph.sites[e.site_a]);
        const double db = norm(mid - graph.sites[e.site_b]);
        CHECK(std::fabs(da - db) < 1e-6);
    }
}

TEST_CASE("single centred obstacle: plan exists and keeps brute-force clearance") {
    const Scenario sc = room_scenario({-3, 0}, {3, 0}, {{{0, 0}, 1.0, 1.0}});
    const std::vector<Vec2> path = voronoi_plan(sc);
    REQUIRE(path.size() >= 2);
    CHECK(norm(path.front() - Vec2{-3, 0}) < 1e-9);
    CHECK(norm(path.back() - Vec2{3, 0}) < 1e-9);
    CHECK(brute_force_clearance(path, sc) >= sc.safe_radius - 1e-9);
}

TEST_CASE("empty room: two-segment connection near the straight line") {
    // Oblong room: its medial axis contains the midline, so the plan is the
    // straight corridor plus two short connectors. (A square room's axis is
    // only the diagonals, which forces a detour through the centre.)
    Scenario sc = room_scenario({-2, 0}, {2, 0}, {});
    sc.room_min = {-5, -2};
    sc.room_max = {5, 2};
    sc.walls = make_walls(sc.room_min, sc.room_max);
    const std::vector<Vec2> path = voronoi_plan(sc);
    CHECK(polyline_length(path) <= 1.10 * 4.0);
}

TEST_CASE("corridor narrower than twice the safe radius yields NoPath") {
    const Scenario sc = room_scenario(
        {-3, 0}, {3, 0}, {{{0, 2.575}, 1.0, 4.85}, {{0, -2.575}, 1.0, 4.85}});
    CHECK_THROWS_AS((void)voronoi_plan(sc), NoPathError);
}

TEST_CASE("follow_path tracks a straight path tightly") {
    Scenario sc = room_scenario({-3, 0}, {3, 0}, {});
    const std::vector<Vec2> path = {{-3, 0}, {3, 0}};
    const Trajectory traj = follow_path(path, sc, sc.sim.dt);
    REQUIRE(traj.termination == Termination::Reached);
    double max_cross = 0.0;
    for (const auto& s : traj.samples) max_cross = std::max(max_cross, std::fabs(s.pose.y));
    CHECK(max_cross < 0.05);
}

TEST_CASE("follow_path rejects a degenerate single-point path") {
    Scenario sc = room_scenario({0, 0}, {1, 0}, {});
    CHECK_THROWS_AS((void)follow_path({{0, 0}}, sc, sc.sim.dt), std::invalid_argument);
}

TEST_CASE("follow_path rounds right-angle corners inside the look-ahead corridor") {
    Scenario sc = room_scenario({-2, 0}, {0, 2}, {});
    const std::vector<Vec2> path = {{-2, 0}, {0, 0}, {0, 2}};
    const Trajectory traj = follow_path(path, sc, sc.sim.dt);
    REQUIRE(traj.termination == Termination::Reached);
    double max_cross = 0.0;
    for (const auto& s : traj.samples) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < path.size(); ++i) {
            const Vec2 a = path[i - 1], b = path[i];
            const Vec2 ab = b - a;
            const double t = std::clamp(dot(s.pose.position() - a, ab) / dot(ab, ab), 0.0, 1.0);
            d = std::min(d, norm(s.pose.position() - (a + t * ab)));
        }
        max_cross = std::max(max_cross, d);
    }
    CHECK(max_cross <= sc.voronoi.pursuit_lookahead + 0.1);
}

TEST_CASE("follow_path reports divergence when steering cannot keep up") {
    Scenario sc = room_scenario({0, 0}, {0.1, 3}, {});
    sc.controller.u_min.omega = -0.25;
    sc.controller.u_max.omega = 0.25;
    sc.controller.u_min.v = 0.9;  // forward-forced, weak steering
    const std::vector<Vec2> path = {{0, 0}, {4, 0}, {0.1, 3}};
    const Trajectory traj = follow_path(path, sc, sc.sim.dt);
    CHECK(traj.termination == Termination::Diverged);
}

TEST_CASE("voronoi trajectories respect the controller input bounds") {
    const Scenario sc = room_scenario({-3, 0}, {3, 0}, {{{0, 0}, 1.0, 1.0}});
    const std::vector<Vec2> path = voronoi_plan(sc);
    const Trajectory traj = follow_path(path, sc, sc.sim.dt);
    for (const auto& s : traj.samples) {
        CHECK(s.twist.v >= sc.controller.u_min.v - 1e-12);
        CHECK(s.twist.v <= sc.controller.u_max.v + 1e-12);
        CHECK(s.twist.omega >= sc.controller.u_min.omega - 1e-12);
        CHECK(s.twist.omega <= sc.controller.u_max.omega + 1e-12);
    }
}
