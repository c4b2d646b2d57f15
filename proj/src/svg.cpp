#include "cbfnav/svg.hpp"

#include <cstdio>
#include <sstream>

namespace cbfnav {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

}  // namespace

std::string scenario_svg(const Scenario& scenario,
                         const std::vector<Trajectory>& trajectories) {
    const double view = 800.0;
    const double margin = 20.0;
    const double span_x = scenario.room_max.x - scenario.room_min.x;
    const double span_y = scenario.room_max.y - scenario.room_min.y;
    const double scale = view / std::max(span_x, span_y);
    auto X = [&](double x) { return margin + (x - scenario.room_min.x) * scale; };
    auto Y = [&](double y) { return margin + (scenario.room_max.y - y) * scale; };

    std::ostringstream s;
    const double w = 2 * margin + span_x * scale;
    const double h = 2 * margin + span_y * scale;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w)
      << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h)
      << "\">\n";
    s << "<rect x=\"" << num(X(scenario.room_min.x)) << "\" y=\""
      << num(Y(scenario.room_max.y)) << "\" width=\"" << num(span_x * scale)
      << "\" height=\"" << num(span_y * scale)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";

    for (const auto& rect : scenario.walls) {
        s << "<rect x=\"" << num(X(rect.center.x - 0.5 * rect.length)) << "\" y=\""
          << num(Y(rect.center.y + 0.5 * rect.width)) << "\" width=\""
          << num(rect.length * scale) << "\" height=\"" << num(rect.width * scale)
          << "\" fill=\"#555555\"/>\n";
    }
    for (const auto& rect : scenario.obstacles) {
        const Disk d = enclosing_disk(rect);
        s << "<circle cx=\"" << num(X(d.center.x)) << "\" cy=\"" << num(Y(d.center.y))
          << "\" r=\"" << num(d.radius * scale)
          << "\" fill=\"#cc2222\" fill-opacity=\"0.15\"/>\n";
        s << "<rect x=\"" << num(X(rect.center.x - 0.5 * rect.length)) << "\" y=\""
          << num(Y(rect.center.y + 0.5 * rect.width)) << "\" width=\""
          << num(rect.length * scale) << "\" height=\"" << num(rect.width * scale)
          << "\" fill=\"#cc2222\"/>\n";
    }

    const char* colors[] = {"#1f77b4", "#2ca02c", "#9467bd"};
    int ci = 0;
    for (const auto& traj : trajectories) {
        s << "<path d=\"";
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const auto& p = traj.samples[i].pose;
            s << (i == 0 ? 'M' : 'L') << num(X(p.x)) << ' ' << num(Y(p.y));
        }
        s << "\" fill=\"none\" stroke=\"" << colors[ci % 3]
          << "\" stroke-width=\"2\"/>\n";
        ++ci;
    }

    s << "<circle cx=\"" << num(X(scenario.start.x)) << "\" cy=\""
      << num(Y(scenario.start.y)) << "\" r=\"6\" fill=\"#2ca02c\"/>\n";
    s << "<circle cx=\"" << num(X(scenario.target.x)) << "\" cy=\""
      << num(Y(scenario.target.y)) << "\" r=\"6\" fill=\"#ff7f0e\"/>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace cbfnav
