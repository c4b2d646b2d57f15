#pragma once

#include <string>

#include "cbfnav/scenario.hpp"

namespace cbfnav {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text of the bundled default scenario (also shipped as
// scenarios/default_room.cfg): 10 m x 10 m room, nine 1 m x 1 m obstacles on
// a 3 x 3 grid, start (-4, -4), the three benchmark targets.
const char* default_scenario_text();

// Parses the sectioned key = value format. Unknown sections or keys are
// ParseErrors; absent keys keep their defaults. The parsed scenario is
// validated before being returned.
Scenario parse_scenario(const std::string& text);

// Reads and parses a scenario file. Throws ParseError (malformed/unreadable)
// or ValidationError (inconsistent geometry).
Scenario load_scenario(const std::string& path);

// Selects the active target (1-based index into [targets]). The target
// heading, and the start heading when the file does not pin one, point along
// the start-to-target bearing.
void select_target(Scenario& scenario, int index);
void select_target_point(Scenario& scenario, Vec2 point);

}  // namespace cbfnav
