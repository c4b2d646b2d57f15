#pragma once

#include <iosfwd>
#include <string>

#include "cbfnav/scenario.hpp"
#include "cbfnav/sim.hpp"

namespace cbfnav {

// Trajectory CSV: header `t,x,y,theta,v,omega,min_h`, one row per sample,
// every value printed with 9 significant digits.
std::string trajectory_csv(const Trajectory& trajectory);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// Parses the CSV back into samples (termination and timing are not part of
// the format). Throws ParseError-compatible std::runtime_error on malformed
// input.
Trajectory parse_trajectory_csv(std::istream& in);

}  // namespace cbfnav
