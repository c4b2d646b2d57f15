#include "cbfnav/voronoi_planner.hpp"

#include <boost/polygon/voronoi.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "cbfnav/clf_cbf.hpp"

namespace cbfnav {

namespace {

constexpr double kScale = 1e4;  // metres -> 0.1 mm integer grid

using IntPoint = boost::polygon::point_data<int>;

std::vector<IntPoint> sample_sites(const Scenario& scenario) {
    std::vector<IntPoint> sites;
    for (const auto& rect : scenario.all_rects()) {
        const double hx = 0.5 * rect.length;
        const double hy = 0.5 * rect.width;
        const Vec2 c = rect.center;
        const Vec2 corners[4] = {{c.x - hx, c.y - hy},
                                 {c.x + hx, c.y - hy},
                                 {c.x + hx, c.y + hy},
                                 {c.x - hx, c.y + hy}};
        for (int e = 0; e < 4; ++e) {
            const Vec2 a = corners[e];
            const Vec2 b = corners[(e + 1) % 4];
            const double len = norm(b - a);
            const int n = std::max(1, static_cast<int>(std::ceil(
                                           len / scenario.voronoi.sample_spacing)));
            for (int i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / n;
                const Vec2 p = a + t * (b - a);
                sites.emplace_back(static_cast<int>(std::lround(p.x * kScale)),
                                   static_cast<int>(std::lround(p.y * kScale)));
            }
        }
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return sites;
}

}  // namespace

std::vector<double> segment_clearances_serial(
    const std::vector<std::pair<Vec2, Vec2>>& segments,
    const std::vector<ObstacleRect>& rects) {
    std::vector<double> out(segments.size(),
                            std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < segments.size(); ++i)
        for (const auto& r : rects)
            out[i] = std::min(out[i], segment_rect_distance(segments[i].first,
                                                            segments[i].second, r));
    return out;
}

std::vector<double> segment_clearances(
    const std::vector<std::pair<Vec2, Vec2>>& segments,
    const std::vector<ObstacleRect>& rects) {
    std::vector<double> out(segments.size(),
                            std::numeric_limits<double>::infinity());
    const int n = static_cast<int>(segments.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (const auto& r : rects)
            out[i] = std::min(out[i], segment_rect_distance(segments[i].first,
                                                            segments[i].second, r));
    return out;
}

RoadmapGraph build_roadmap(const Scenario& scenario) {
    const std::vector<IntPoint> sites = sample_sites(scenario);
    boost::polygon::voronoi_diagram<double> vd;
    boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);

    RoadmapGraph graph;
    graph.sites.reserve(sites.size());
    for (const auto& s : sites)
        graph.sites.push_back({s.x() / kScale, s.y() / kScale});

    // Deduplicate Voronoi vertices on a fine grid.
    std::map<std::pair<long long, long long>, int> vertex_index;
    auto vertex_id = [&](double x, double y) {
        const std::pair<long long, long long> key{
            static_cast<long long>(std::llround(x * 1000.0)),
            static_cast<long long>(std::llround(y * 1000.0))};
        auto [it, inserted] = vertex_index.try_emplace(
            key, static_cast<int>(graph.vertices.size()));
        if (inserted) graph.vertices.push_back({x / kScale, y / kScale});
        return it->second;
    };

    std::vector<std::pair<Vec2, Vec2>> candidate_segments;
    std::vector<RoadmapEdge> candidates;
    for (const auto& edge : vd.edges()) {
        if (!edge.is_finite() || !edge.is_primary()) continue;
        if (&edge > edge.twin()) continue;  // each pair once
        const double x0 = edge.vertex0()->x(), y0 = edge.vertex0()->y();
        const double x1 = edge.vertex1()->x(), y1 = edge.vertex1()->y();
        const Vec2 a{x0 / kScale, y0 / kScale};
        const Vec2 b{x1 / kScale, y1 / kScale};
        if (!scenario.inside_room(a) || !scenario.inside_room(b)) continue;

        RoadmapEdge re;
        re.a = vertex_id(x0, y0);
        re.b = vertex_id(x1, y1);
        if (re.a == re.b) continue;
        re.length = norm(b - a);
        re.site_a = static_cast<int>(edge.cell()->source_index());
        re.site_b = static_cast<int>(edge.twin()->cell()->source_index());
        candidates.push_back(re);
        candidate_segments.emplace_back(a, b);
    }

    const std::vector<ObstacleRect> rects = scenario.all_rects();
    const std::vector<double> clearances = segment_clearances(candidate_segments, rects);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (clearances[i] >= scenario.safe_radius) {
            candidates[i].clearance = clearances[i];
            graph.edges.push_back(candidates[i]);
        }
    }
    return graph;
}

namespace {

// Nearest roadmap vertex whose straight connector keeps clearance >= r_s.
int connect_point(Vec2 p, const RoadmapGraph& graph,
                  const std::vector<ObstacleRect>& rects, double safe_radius) {
    std::vector<int> order(graph.vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return norm(graph.vertices[a] - p) < norm(graph.vertices[b] - p);
    });
    for (int idx : order) {
        double clearance = std::numeric_limits<double>::infinity();
        for (const auto& r : rects)
            clearance = std::min(clearance,
                                 segment_rect_distance(p, graph.vertices[idx], r));
        if (clearance >= safe_radius) return idx;
    }
    return -1;
}

}  // namespace

std::vector<Vec2> voronoi_plan(const Scenario& scenario) {
    const RoadmapGraph graph = build_roadmap(scenario);
    const std::vector<ObstacleRect> rects = scenario.all_rects();
    const Vec2 start = scenario.start.position();
    const Vec2 goal = scenario.target.position();

    if (graph.vertices.empty()) throw NoPathError("voronoi: empty roadmap");
    const int vs = connect_point(start, graph, rects, scenario.safe_radius);
    const int vt = connect_point(goal, graph, rects, scenario.safe_radius);
    if (vs < 0 || vt < 0)
        throw NoPathError("voronoi: cannot connect start or target to roadmap");

    const int n = static_cast<int>(graph.vertices.size());
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : graph.edges) {
        adj[e.a].emplace_back(e.b, e.length);
        adj[e.b].emplace_back(e.a, e.length);
    }

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[vs] = 0.0;
    pq.emplace(0.0, vs);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == vt) break;
        for (const auto& [v, w] : adj[u]) {
            if (dist[u] + w < dist[v]) {
                dist[v] = dist[u] + w;
                prev[v] = u;
                pq.emplace(dist[v], v);
            }
        }
    }
    if (!std::isfinite(dist[vt]))
        throw NoPathError("voronoi: start and target roadmap components disconnected");

    std::vector<Vec2> path;
    for (int v = vt; v != -1; v = prev[v]) path.push_back(graph.vertices[v]);
    std::reverse(path.begin(), path.end());
    path.insert(path.begin(), start);
    path.push_back(goal);
    return path;
}

Trajectory follow_path(const std::vector<Vec2>& path, const Scenario& scenario,
                       double dt) {
    if (path.size() < 2)
        throw std::invalid_argument("follow_path: path needs at least 2 points");
    using clock = std::chrono::steady_clock;
    const ControllerParams& ctrl = scenario.controller;
    const double lookahead = scenario.voronoi.pursuit_lookahead;
    const std::vector<Disk> disks = cbf_disks(scenario);

    std::vector<double> arclen(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i)
        arclen[i] = arclen[i - 1] + norm(path[i] - path[i - 1]);
    const double total = arclen.back();

    auto point_at = [&](double s) -> Vec2 {
        s = std::clamp(s, 0.0, total);
        for (std::size_t i = 1; i < path.size(); ++i) {
            if (s <= arclen[i]) {
                const double seg = arclen[i] - arclen[i - 1];
                const double t = seg > 0.0 ? (s - arclen[i - 1]) / seg : 0.0;
                return path[i - 1] + t * (path[i] - path[i - 1]);
            }
        }
        return path.back();
    };

    auto project = [&](Vec2 p) {
        double best = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        for (std::size_t i = 1; i < path.size(); ++i) {
            const Vec2 a = path[i - 1], b = path[i];
            const Vec2 ab = b - a;
            const double len2 = dot(ab, ab);
            const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
            const Vec2 q = a + t * ab;
            const double d = norm(p - q);
            if (d < best) {
                best = d;
                best_s = arclen[i - 1] + t * std::sqrt(len2);
            }
        }
        return std::pair<double, double>{best_s, best};
    };

    Trajectory traj;
    Pose2D state{path.front().x, path.front().y, scenario.start.theta};
    const Vec2 goal = path.back();
    for (int k = 0;; ++k) {
        const double h = min_cbf_value(state, disks, scenario.safe_radius, 0.0);
        const double err = norm(state.position() - goal);
        if (err < scenario.sim.capture_radius) {
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::Reached;
            return traj;
        }
        if (k >= scenario.sim.max_steps) {
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::TimedOut;
            return traj;
        }

        const auto t0 = clock::now();
        const auto [s_proj, cross_track] = project(state.position());
        const Vec2 carrot = point_at(s_proj + lookahead);
        const double bearing = std::atan2(carrot.y - state.y, carrot.x - state.x);
        const double herr = wrap_angle(bearing - state.theta);
        Twist u;
        u.omega = std::clamp(2.5 * herr, ctrl.u_min.omega, ctrl.u_max.omega);
        u.v = std::clamp(ctrl.u_max.v * std::max(0.1, std::cos(herr)), ctrl.u_min.v,
                         ctrl.u_max.v);
        u.v = std::clamp(std::min(u.v, 2.0 * err), ctrl.u_min.v, ctrl.u_max.v);
        traj.planning_seconds += std::chrono::duration<double>(clock::now() - t0).count();

        if (cross_track > 1.0) {
            traj.samples.push_back({k * dt, state, Twist{0.0, 0.0}, h});
            traj.termination = Termination::Diverged;
            return traj;
        }

        traj.samples.push_back({k * dt, state, u, h});
        state = integrate(state, u, dt);
    }
}

}  // namespace cbfnav
