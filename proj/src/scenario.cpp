#include "cbfnav/scenario.hpp"

#include <cmath>
#include <string>

namespace cbfnav {

namespace {
// Radius of the surrogate disk standing in for a wall. Large enough that
// the arc is flat across the room (sagitta < 2 cm over a 10 m span).
constexpr double kWallDiskRadius = 1000.0;
}  // namespace

Eigen::Matrix3d ClfParams::matrix() const {
    Eigen::Matrix3d P;
    P << p1, 0.0, p2, 0.0, p3, p4, p2, p4, p5;
    return P;
}

void ClfParams::validate() const {
    // Leading principal minors of the structured P.
    const double m1 = p1;
    const double m2 = p1 * p3;
    const double m3 = p1 * (p3 * p5 - p4 * p4) - p2 * (p2 * p3);
    if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
        throw std::invalid_argument("ClfParams: P is not positive definite");
    if (!(lambda > 0.0)) throw std::invalid_argument("ClfParams: lambda must be > 0");
}

void CbfParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("CbfParams: gamma must be > 0");
    if (!(lookahead > 0.0))
        throw std::invalid_argument("CbfParams: lookahead must be > 0");
}

void ControllerParams::validate() const {
    clf.validate();
    cbf.validate();
    auto check_spd2 = [](const Eigen::Matrix2d& M, const char* name) {
        if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 || M(0, 0) <= 0.0 ||
            M.determinant() <= 0.0)
            throw std::invalid_argument(std::string(name) + " must be SPD");
    };
    check_spd2(input_cost, "ControllerParams: H");
    check_spd2(smoothness_cost, "ControllerParams: Q");
    if (!(relaxation_weight > 0.0))
        throw std::invalid_argument("ControllerParams: relaxation weight must be > 0");
    if (!(u_min.v < u_max.v && u_min.omega < u_max.omega))
        throw std::invalid_argument("ControllerParams: bounds must satisfy u_min < u_max");
}

void ApfParams::validate() const {
    if (!(k_att > 0.0 && k_rep > 0.0 && rho0 > 0.0 && step_gain > 0.0 &&
          heading_gain > 0.0))
        throw std::invalid_argument("ApfParams: all gains must be > 0");
}

void VoronoiParams::validate() const {
    if (!(sample_spacing > 0.0 && pursuit_lookahead > 0.0))
        throw std::invalid_argument("VoronoiParams: spacings must be > 0");
}

void SimParams::validate() const {
    if (!(dt > 0.0 && capture_radius > 0.0 && max_steps > 0))
        throw std::invalid_argument("SimParams: dt, capture radius, max steps must be > 0");
}

std::vector<ObstacleRect> Scenario::all_rects() const {
    std::vector<ObstacleRect> out = obstacles;
    out.insert(out.end(), walls.begin(), walls.end());
    return out;
}

std::vector<ObstacleRect> make_walls(Vec2 room_min, Vec2 room_max, double thickness) {
    const double lx = room_max.x - room_min.x;
    const double ly = room_max.y - room_min.y;
    const double t = thickness;
    std::vector<ObstacleRect> walls;
    // Span slightly past the corners so the boundary is closed.
    walls.push_back({{0.5 * (room_min.x + room_max.x), room_max.y + 0.5 * t}, lx + 2 * t, t});
    walls.push_back({{0.5 * (room_min.x + room_max.x), room_min.y - 0.5 * t}, lx + 2 * t, t});
    walls.push_back({{room_min.x - 0.5 * t, 0.5 * (room_min.y + room_max.y)}, t, ly + 2 * t});
    walls.push_back({{room_max.x + 0.5 * t, 0.5 * (room_min.y + room_max.y)}, t, ly + 2 * t});
    return walls;
}

std::vector<Disk> cbf_disks(const Scenario& scenario) {
    std::vector<Disk> disks;
    disks.reserve(scenario.obstacles.size() + scenario.walls.size());
    for (const auto& rect : scenario.obstacles) disks.push_back(enclosing_disk(rect));

    const Vec2 room_center = 0.5 * (scenario.room_min + scenario.room_max);
    for (const auto& wall : scenario.walls) {
        // Tangent disk: centre pushed out along the wall's outward normal so
        // the disk boundary coincides with the inner face at its midpoint.
        Vec2 n{0.0, 0.0};
        Vec2 face = wall.center;
        if (wall.length >= wall.width) {
            n.y = (wall.center.y > room_center.y) ? 1.0 : -1.0;
            face.y -= n.y * 0.5 * wall.width;
        } else {
            n.x = (wall.center.x > room_center.x) ? 1.0 : -1.0;
            face.x -= n.x * 0.5 * wall.length;
        }
        disks.push_back(Disk{face + kWallDiskRadius * n, kWallDiskRadius});
    }
    return disks;
}

void validate_scenario(const Scenario& scenario) {
    scenario.controller.validate();
    scenario.apf.validate();
    scenario.voronoi.validate();
    scenario.sim.validate();
    if (!(scenario.room_min.x < scenario.room_max.x &&
          scenario.room_min.y < scenario.room_max.y))
        throw ValidationError("scenario: empty room");
    if (!(scenario.safe_radius > 0.0))
        throw ValidationError("scenario: safe radius must be > 0");
    if (!scenario.inside_room(scenario.start.position()))
        throw ValidationError("scenario: start outside room");
    for (const auto& t : scenario.targets)
        if (!scenario.inside_room(t.position()))
            throw ValidationError("scenario: target outside room");
    if (!scenario.inside_room(scenario.target.position()))
        throw ValidationError("scenario: target outside room");
    for (const auto& rect : scenario.obstacles) {
        const Disk d = enclosing_disk(rect);
        if (norm(scenario.start.position() - d.center) <= d.radius + scenario.safe_radius)
            throw ValidationError("scenario: start inside inflated obstacle disk");
    }
}

}  // namespace cbfnav
