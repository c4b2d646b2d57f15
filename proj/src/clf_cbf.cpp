#include "cbfnav/clf_cbf.hpp"

#include <cmath>

namespace cbfnav {

ErrorVec controller_error(const Pose2D& state, const Pose2D& target,
                          double switch_radius) {
    const double ex = state.x - target.x;
    const double ey = state.y - target.y;
    const double dist = std::hypot(ex, ey);
    double theta_ref = target.theta;
    if (dist > switch_radius) theta_ref = std::atan2(target.y - state.y, target.x - state.x);
    return ErrorVec{ex, ey, wrap_angle(state.theta - theta_ref)};
}

double clf_value(const ErrorVec& e, const ClfParams& params) {
    const Eigen::Vector3d ev(e.ex, e.ey, e.etheta);
    return ev.dot(params.matrix() * ev);
}

ConstraintRow clf_constraint_row(const Pose2D& state, const Pose2D& target,
                                 const ClfParams& params, double switch_radius) {
    const ErrorVec e = controller_error(state, target, switch_radius);
    const Eigen::Vector3d ev(e.ex, e.ey, e.etheta);
    const Eigen::Vector3d grad = 2.0 * params.matrix() * ev;  // dV/de, de/ds = I
    ConstraintRow row;
    row.lf = 0.0;
    row.lg_v = grad(0) * std::cos(state.theta) + grad(1) * std::sin(state.theta);
    row.lg_omega = grad(2);
    row.rhs = -params.lambda * clf_value(e, params);
    return row;
}

double cbf_value(const Pose2D& state, const Disk& obstacle, double safe_radius,
                 double lookahead) {
    const double lx = state.x + lookahead * std::cos(state.theta);
    const double ly = state.y + lookahead * std::sin(state.theta);
    const double dx = lx - obstacle.center.x;
    const double dy = ly - obstacle.center.y;
    const double ri = safe_radius + obstacle.radius;
    return dx * dx + dy * dy - ri * ri;
}

ConstraintRow cbf_constraint_row(const Pose2D& state, const Disk& obstacle,
                                 double safe_radius, const CbfParams& params) {
    const double c = std::cos(state.theta);
    const double s = std::sin(state.theta);
    const double d = params.lookahead;
    const double dx = state.x + d * c - obstacle.center.x;
    const double dy = state.y + d * s - obstacle.center.y;
    ConstraintRow row;
    row.lf = 0.0;
    row.lg_v = 2.0 * (dx * c + dy * s);
    row.lg_omega = 2.0 * d * (-dx * s + dy * c);
    row.rhs = -params.gamma * cbf_value(state, obstacle, safe_radius, d);
    return row;
}

double min_cbf_value(const Pose2D& state, const std::vector<Disk>& obstacles,
                     double safe_radius, double lookahead) {
    double hmin = std::numeric_limits<double>::infinity();
    for (const auto& o : obstacles)
        hmin = std::min(hmin, cbf_value(state, o, safe_radius, lookahead));
    return hmin;
}

QPProblem assemble_qp(const Pose2D& state, const Pose2D& target,
                      const std::vector<Disk>& obstacles, const Twist& u_last,
                      const ControllerParams& params, double safe_radius) {
    const int n = 3;  // (v, omega, delta)
    const int m = 1 + static_cast<int>(obstacles.size());

    QPProblem p;
    p.H = Eigen::MatrixXd::Zero(n, n);
    p.H.topLeftCorner<2, 2>() = params.input_cost + 2.0 * params.smoothness_cost;
    p.H(2, 2) = 2.0 * params.relaxation_weight;

    p.f = Eigen::VectorXd::Zero(n);
    const Eigen::Vector2d ul(u_last.v, u_last.omega);
    p.f.head<2>() = -2.0 * params.smoothness_cost * ul;

    p.A = Eigen::MatrixXd::Zero(m, n);
    p.b = Eigen::VectorXd::Zero(m);

    // CLF row with slack: LgV u - delta <= -lambda V.
    const ConstraintRow clf =
        clf_constraint_row(state, target, params.clf, params.heading_switch_radius);
    p.A(0, 0) = clf.lg_v;
    p.A(0, 1) = clf.lg_omega;
    p.A(0, 2) = -1.0;
    p.b(0) = clf.rhs;

    // Hard CBF rows: -Lgh u <= gamma h.
    for (int i = 0; i < static_cast<int>(obstacles.size()); ++i) {
        const ConstraintRow cbf =
            cbf_constraint_row(state, obstacles[i], safe_radius, params.cbf);
        p.A(1 + i, 0) = -cbf.lg_v;
        p.A(1 + i, 1) = -cbf.lg_omega;
        p.b(1 + i) = -cbf.rhs;
    }

    p.lower.resize(n);
    p.upper.resize(n);
    p.lower << params.u_min.v, params.u_min.omega, 0.0;
    p.upper << params.u_max.v, params.u_max.omega,
        std::numeric_limits<double>::infinity();
    return p;
}

ControlStepResult control_step(const Pose2D& state, const Pose2D& target,
                               const std::vector<Disk>& obstacles, Twist& u_last,
                               const ControllerParams& params, double safe_radius) {
    const QPProblem qp = assemble_qp(state, target, obstacles, u_last, params, safe_radius);
    const QPSolution sol = solve_qp(qp);

    ControlStepResult res;
    res.status = sol.status;
    if (sol.status == QPStatus::Optimal) {
        res.u = Twist{sol.u(0), sol.u(1)};
        res.delta = sol.u(2);
    } else {
        res.u = Twist{0.0, 0.0};
        res.delta = 0.0;
        res.qp_infeasible = true;
    }
    u_last = res.u;
    return res;
}

}  // namespace cbfnav
