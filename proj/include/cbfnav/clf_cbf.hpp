#pragma once

#include <vector>

#include "cbfnav/qp_solver.hpp"
#include "cbfnav/scenario.hpp"

namespace cbfnav {

// Error used by the Lyapunov function. During transit the heading error is
// taken against the bearing to the target; inside `switch_radius` it is
// taken against the target heading. The reference heading is held fixed
// within a control step, so the error Jacobian w.r.t. the state is the
// identity.
ErrorVec controller_error(const Pose2D& state, const Pose2D& target,
                          double switch_radius);

// V(e) = e' P e.
double clf_value(const ErrorVec& e, const ClfParams& params);

struct ConstraintRow {
    double lf = 0.0;       // drift term (zero for the driftless unicycle)
    double lg_v = 0.0;     // input column for v
    double lg_omega = 0.0;  // input column for omega
    double rhs = 0.0;
};

// Lyapunov decrease row: LfV + LgV u <= -lambda V (+ slack), rhs = -lambda V.
ConstraintRow clf_constraint_row(const Pose2D& state, const Pose2D& target,
                                 const ClfParams& params,
                                 double switch_radius = 0.1);

// Barrier value at the look-ahead point d ahead of the axle:
//   h = (x~ - xo)^2 + (y~ - yo)^2 - (r_s + r_o)^2.
double cbf_value(const Pose2D& state, const Disk& obstacle, double safe_radius,
                 double lookahead);

// Barrier row: Lfh + Lgh u >= -gamma h, rhs = -gamma h.
ConstraintRow cbf_constraint_row(const Pose2D& state, const Disk& obstacle,
                                 double safe_radius, const CbfParams& params);

// Smallest barrier value over all obstacles.
double min_cbf_value(const Pose2D& state, const std::vector<Disk>& obstacles,
                     double safe_radius, double lookahead);

// Builds the controller QP over the decision vector (v, omega, delta):
//   min 1/2 u'Hu + p delta^2 + (u - u_l)'Q(u - u_l)
//   s.t. one slack-relaxed CLF row, one hard CBF row per obstacle,
//        box bounds on (v, omega), delta >= 0.
QPProblem assemble_qp(const Pose2D& state, const Pose2D& target,
                      const std::vector<Disk>& obstacles, const Twist& u_last,
                      const ControllerParams& params, double safe_radius);

// One planner step: solves the QP and returns the (v, omega) block.
// Infeasible QPs yield the safe fallback Twist{0, 0} and set the flag.
struct ControlStepResult {
    Twist u;
    double delta = 0.0;      // CLF slack value
    bool qp_infeasible = false;
    QPStatus status = QPStatus::Optimal;
};

ControlStepResult control_step(const Pose2D& state, const Pose2D& target,
                               const std::vector<Disk>& obstacles,
                               Twist& u_last, const ControllerParams& params,
                               double safe_radius);

// Stateful wrapper holding the previous control for the smoothness term.
class ClfCbfController {
  public:
    ClfCbfController(ControllerParams params, double safe_radius)
        : params_(std::move(params)), safe_radius_(safe_radius) {
        params_.validate();
    }

    ControlStepResult step(const Pose2D& state, const Pose2D& target,
                           const std::vector<Disk>& obstacles) {
        return control_step(state, target, obstacles, u_last_, params_, safe_radius_);
    }

    const Twist& last_control() const { return u_last_; }
    const ControllerParams& params() const { return params_; }

  private:
    ControllerParams params_;
    double safe_radius_;
    Twist u_last_{0.0, 0.0};
};

}  // namespace cbfnav
