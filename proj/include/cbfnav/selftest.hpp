#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbfnav {

struct SelftestCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool less_than = true;  // pass iff measured < threshold (else >=)
    double seconds = 0.0;
    bool passed = false;
};

// Runs the vision-geometry checks that have independent ground truth:
// RANSAC classification quality, bundle-adjustment recovery, Jacobian
// finite differences, triangulation and Sim3 composition cross-checks.
// sigma_px overrides the observation noise of the RANSAC scene (0.5 by
// default); pushing it up is expected to break the classification checks.
std::vector<SelftestCheck> run_vision_selftest(std::uint64_t seed,
                                               double sigma_px = 0.5);

// One line per check: name, measured value, threshold, PASS/FAIL, seconds.
// Returns true iff every check passed.
bool print_selftest_report(std::ostream& out,
                           const std::vector<SelftestCheck>& checks);

}  // namespace cbfnav
