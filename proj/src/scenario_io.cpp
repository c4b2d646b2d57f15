#include "cbfnav/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cbfnav {

const char* default_scenario_text() {
    return R"(# Default benchmark room: 10 m x 10 m, nine 1 m x 1 m tables on a 3x3 grid.
[room]
min = -5 -5
max = 5 5
wall_thickness = 0.1

[obstacles]
rect = -2.5 -2.5 1 1
rect = 0 -2.5 1 1
rect = 2.5 -2.5 1 1
rect = -2.5 0 1 1
rect = 0 0 1 1
rect = 2.5 0 1 1
rect = -2.5 2.5 1 1
rect = 0 2.5 1 1
rect = 2.5 2.5 1 1

[start]
pose = -4 -4

[targets]
point = 2.5 -1.0
point = 2.5 1.5
point = 0 1.5

[controller]
p1 = 1.0
p2 = 0.0
p3 = 1.0
p4 = 0.0
p5 = 0.2
lambda = 1.0
gamma = 1.0
lookahead = 0.15
h = 1.0
q = 0.5
relaxation_weight = 10.0
v_min = 0.0
v_max = 1.0
omega_min = -1.2
omega_max = 1.2
heading_switch_radius = 0.1

[apf]
k_att = 1.0
k_rep = 0.2
rho0 = 0.5
step_gain = 1.0
heading_gain = 2.0

[voronoi]
sample_spacing = 0.1
pursuit_lookahead = 0.3

[sim]
dt = 0.05
capture_radius = 0.1
max_steps = 4000
safe_radius = 0.2
)";
}

namespace {

std::vector<double> parse_numbers(const std::string& value, const std::string& ctx) {
    std::istringstream ss(value);
    std::vector<double> out;
    double x;
    while (ss >> x) out.push_back(x);
    std::string rest;
    if (ss.fail() && !ss.eof()) throw ParseError("scenario: bad number in " + ctx);
    if (out.empty()) throw ParseError("scenario: missing value for " + ctx);
    return out;
}

double single(const std::vector<double>& v, const std::string& ctx) {
    if (v.size() != 1) throw ParseError("scenario: expected one value for " + ctx);
    return v[0];
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    sc.obstacles.clear();
    sc.targets.clear();
    std::vector<double> start_vals;
    double wall_thickness = 0.1;
    double h_scale = 1.0, q_scale = 0.5;

    std::istringstream in(text);
    std::string line;
    std::string section;
    bool any_content = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        any_content = true;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("scenario: malformed section at line " +
                                 std::to_string(lineno));
            section = line.substr(1, line.size() - 2);
            if (section != "room" && section != "obstacles" && section != "start" &&
                section != "targets" && section != "controller" && section != "apf" &&
                section != "voronoi" && section != "sim")
                throw ParseError("scenario: unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("scenario: expected key = value at line " +
                             std::to_string(lineno));
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::string value = line.substr(eq + 1);
        const std::string ctx = "[" + section + "] " + key;
        const std::vector<double> vals = parse_numbers(value, ctx);

        if (section == "room") {
            if (key == "min") {
                if (vals.size() != 2) throw ParseError("scenario: room min needs 2 values");
                sc.room_min = {vals[0], vals[1]};
            } else if (key == "max") {
                if (vals.size() != 2) throw ParseError("scenario: room max needs 2 values");
                sc.room_max = {vals[0], vals[1]};
            } else if (key == "wall_thickness") {
                wall_thickness = single(vals, ctx);
            } else {
                throw ParseError("scenario: unknown key " + ctx);
            }
        } else if (section == "obstacles") {
            if (key != "rect") throw ParseError("scenario: unknown key " + ctx);
            if (vals.size() != 4)
                throw ParseError("scenario: rect needs cx cy length width");
            sc.obstacles.push_back({{vals[0], vals[1]}, vals[2], vals[3]});
        } else if (section == "start") {
            if (key != "pose") throw ParseError("scenario: unknown key " + ctx);
            if (vals.size() != 2 && vals.size() != 3)
                throw ParseError("scenario: start pose needs x y [theta]");
            start_vals = vals;
        } else if (section == "targets") {
            if (key != "point") throw ParseError("scenario: unknown key " + ctx);
            if (vals.size() != 2) throw ParseError("scenario: target point needs x y");
            sc.targets.push_back(Pose2D{vals[0], vals[1], 0.0});
        } else if (section == "controller") {
            auto& c = sc.controller;
            if (key == "p1") c.clf.p1 = single(vals, ctx);
            else if (key == "p2") c.clf.p2 = single(vals, ctx);
            else if (key == "p3") c.clf.p3 = single(vals, ctx);
            else if (key == "p4") c.clf.p4 = single(vals, ctx);
            else if (key == "p5") c.clf.p5 = single(vals, ctx);
            else if (key == "lambda") c.clf.lambda = single(vals, ctx);
            else if (key == "gamma") c.cbf.gamma = single(vals, ctx);
            else if (key == "lookahead") c.cbf.lookahead = single(vals, ctx);
            else if (key == "h") h_scale = single(vals, ctx);
            else if (key == "q") q_scale = single(vals, ctx);
            else if (key == "relaxation_weight") c.relaxation_weight = single(vals, ctx);
            else if (key == "v_min") c.u_min.v = single(vals, ctx);
            else if (key == "v_max") c.u_max.v = single(vals, ctx);
            else if (key == "omega_min") c.u_min.omega = single(vals, ctx);
            else if (key == "omega_max") c.u_max.omega = single(vals, ctx);
            else if (key == "heading_switch_radius") c.heading_switch_radius = single(vals, ctx);
            else throw ParseError("scenario: unknown key " + ctx);
        } else if (section == "apf") {
            auto& a = sc.apf;
            if (key == "k_att") a.k_att = single(vals, ctx);
            else if (key == "k_rep") a.k_rep = single(vals, ctx);
            else if (key == "rho0") a.rho0 = single(vals, ctx);
            else if (key == "step_gain") a.step_gain = single(vals, ctx);
            else if (key == "heading_gain") a.heading_gain = single(vals, ctx);
            else throw ParseError("scenario: unknown key " + ctx);
        } else if (section == "voronoi") {
            auto& v = sc.voronoi;
            if (key == "sample_spacing") v.sample_spacing = single(vals, ctx);
            else if (key == "pursuit_lookahead") v.pursuit_lookahead = single(vals, ctx);
            else throw ParseError("scenario: unknown key " + ctx);
        } else if (section == "sim") {
            auto& s = sc.sim;
            if (key == "dt") s.dt = single(vals, ctx);
            else if (key == "capture_radius") s.capture_radius = single(vals, ctx);
            else if (key == "max_steps") s.max_steps = static_cast<int>(single(vals, ctx));
            else if (key == "safe_radius") sc.safe_radius = single(vals, ctx);
            else throw ParseError("scenario: unknown key " + ctx);
        } else {
            throw ParseError("scenario: key outside any section at line " +
                             std::to_string(lineno));
        }
    }
    if (!any_content) throw ParseError("scenario: empty file");
    if (sc.targets.empty()) throw ParseError("scenario: no targets configured");

    sc.controller.input_cost = h_scale * Eigen::Matrix2d::Identity();
    sc.controller.smoothness_cost = q_scale * Eigen::Matrix2d::Identity();
    sc.walls = make_walls(sc.room_min, sc.room_max, wall_thickness);

    if (start_vals.empty()) throw ParseError("scenario: missing start pose");
    sc.start.x = start_vals[0];
    sc.start.y = start_vals[1];
    if (start_vals.size() == 3) {
        sc.start.theta = wrap_angle(start_vals[2]);
        sc.start_theta_from_bearing = false;
    }

    // Active target defaults to the last configured one.
    select_target(sc, static_cast<int>(sc.targets.size()));

    validate_scenario(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void select_target(Scenario& scenario, int index) {
    if (index < 1 || index > static_cast<int>(scenario.targets.size()))
        throw std::invalid_argument("select_target: index out of range");
    select_target_point(scenario,
                        scenario.targets[static_cast<size_t>(index - 1)].position());
}

void select_target_point(Scenario& scenario, Vec2 point) {
    const double bearing =
        std::atan2(point.y - scenario.start.y, point.x - scenario.start.x);
    scenario.target = Pose2D{point.x, point.y, bearing};
    if (scenario.start_theta_from_bearing) scenario.start.theta = bearing;
}

}  // namespace cbfnav
