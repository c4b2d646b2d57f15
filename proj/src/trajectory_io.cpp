#include "cbfnav/trajectory_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace cbfnav {

namespace {

std::string g9(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream out;
    write_trajectory_csv(out, trajectory);
    return out.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,x,y,theta,v,omega,min_h\n";
    for (const auto& s : trajectory.samples) {
        out << g9(s.t) << ',' << g9(s.pose.x) << ',' << g9(s.pose.y) << ','
            << g9(s.pose.theta) << ',' << g9(s.twist.v) << ',' << g9(s.twist.omega)
            << ',' << g9(s.min_h) << '\n';
    }
}

Trajectory parse_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t,x,y,theta,v,omega,min_h")
        throw std::runtime_error("trajectory csv: bad header");
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double vals[7];
        char comma;
        for (int i = 0; i < 7; ++i) {
            if (!(ss >> vals[i])) throw std::runtime_error("trajectory csv: bad row");
            if (i < 6 && !(ss >> comma && comma == ','))
                throw std::runtime_error("trajectory csv: bad row");
        }
        TrajectorySample s;
        s.t = vals[0];
        s.pose = Pose2D{vals[1], vals[2], vals[3]};
        s.twist = Twist{vals[4], vals[5]};
        s.min_h = vals[6];
        traj.samples.push_back(s);
    }
    if (traj.samples.empty()) throw std::runtime_error("trajectory csv: no samples");
    return traj;
}

}  // namespace cbfnav
