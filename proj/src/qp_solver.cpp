#include "cbfnav/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cbfnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCondLimit = 1e12;
constexpr double kStepTol = 1e-10;
constexpr double kDirTol = 1e-12;

struct Rows {
    Eigen::MatrixXd G;  // stacked as rows, G u <= h
    Eigen::VectorXd h;
};

// General rows first, then upper-bound rows, then lower-bound rows, in index
// order. The ordering fixes all tie-breaks, which keeps the solver
// deterministic.
Rows stack_rows(const QPProblem& p) {
    const int n = static_cast<int>(p.H.rows());
    const int m = static_cast<int>(p.A.rows());
    std::vector<std::pair<Eigen::RowVectorXd, double>> rows;
    rows.reserve(m + 2 * n);
    for (int i = 0; i < m; ++i) rows.emplace_back(p.A.row(i), p.b(i));
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(p.upper(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = 1.0;
            rows.emplace_back(r, p.upper(j));
        }
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(p.lower(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = -1.0;
            rows.emplace_back(r, -p.lower(j));
        }
    }
    Rows out;
    out.G.resize(static_cast<int>(rows.size()), n);
    out.h.resize(static_cast<int>(rows.size()));
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        out.G.row(i) = rows[i].first;
        out.h(i) = rows[i].second;
    }
    return out;
}

struct CoreResult {
    Eigen::VectorXd x;
    QPStatus status = QPStatus::IterationLimit;
    int iterations = 0;
};

// Primal active-set iteration from a feasible start. W holds indices of the
// working set; constraints dropped by most-negative multiplier, blocking
// constraints added by smallest step (first index wins ties).
CoreResult active_set_core(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                           const Rows& rows, Eigen::VectorXd x, double tol,
                           int max_iterations) {
    const int n = static_cast<int>(H.rows());
    const int m = static_cast<int>(rows.G.rows());

    std::vector<int> W;
    // Seed the working set with constraints active at the start, keeping the
    // rows linearly independent.
    for (int i = 0; i < m && static_cast<int>(W.size()) < n; ++i) {
        if (std::fabs(rows.G.row(i) * x - rows.h(i)) <= tol) {
            Eigen::MatrixXd Gt(static_cast<int>(W.size()) + 1, n);
            for (int k = 0; k < static_cast<int>(W.size()); ++k) Gt.row(k) = rows.G.row(W[k]);
            Gt.row(static_cast<int>(W.size())) = rows.G.row(i);
            if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(Gt.transpose()).rank() ==
                Gt.rows())
                W.push_back(i);
        }
    }

    CoreResult res;
    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter + 1;
        const int nw = static_cast<int>(W.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + nw, n + nw);
        K.topLeftCorner(n, n) = H;
        for (int k = 0; k < nw; ++k) {
            K.block(0, n + k, n, 1) = rows.G.row(W[k]).transpose();
            K.block(n + k, 0, 1, n) = rows.G.row(W[k]);
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + nw);
        rhs.head(n) = -(H * x + f);

        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
        const double pmax = piv.maxCoeff();
        const double pmin = piv.minCoeff();
        if (!(pmin > 0.0) || pmax / pmin > kCondLimit) {
            res.x = x;
            res.status = QPStatus::IterationLimit;
            return res;
        }
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd p = sol.head(n);
        const Eigen::VectorXd lambda = sol.tail(nw);

        if (p.lpNorm<Eigen::Infinity>() <= kStepTol) {
            int drop = -1;
            double most_negative = -tol;
            for (int k = 0; k < nw; ++k) {
                if (lambda(k) < most_negative) {
                    most_negative = lambda(k);
                    drop = k;
                }
            }
            if (drop < 0) {
                res.x = x;
                res.status = QPStatus::Optimal;
                return res;
            }
            W.erase(W.begin() + drop);
            continue;
        }

        double alpha = 1.0;
        int blocking = -1;
        for (int i = 0; i < m; ++i) {
            if (std::find(W.begin(), W.end(), i) != W.end()) continue;
            const double gp = rows.G.row(i) * p;
            if (gp > kDirTol) {
                const double a = (rows.h(i) - rows.G.row(i) * x) / gp;
                if (a < alpha) {
                    alpha = std::max(a, 0.0);
                    blocking = i;
                }
            }
        }
        x += alpha * p;
        if (blocking >= 0) W.push_back(blocking);
    }
    res.x = x;
    res.status = QPStatus::IterationLimit;
    return res;
}

double max_violation(const Rows& rows, const Eigen::VectorXd& x) {
    if (rows.G.rows() == 0) return 0.0;
    return (rows.G * x - rows.h).maxCoeff();
}

}  // namespace

const char* to_string(QPStatus s) {
    switch (s) {
        case QPStatus::Optimal: return "Optimal";
        case QPStatus::Infeasible: return "Infeasible";
        case QPStatus::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

QPProblem QPProblem::unconstrained(Eigen::MatrixXd H, Eigen::VectorXd f) {
    const auto n = H.rows();
    QPProblem p;
    p.H = std::move(H);
    p.f = std::move(f);
    p.A = Eigen::MatrixXd::Zero(0, n);
    p.b = Eigen::VectorXd::Zero(0);
    p.lower = Eigen::VectorXd::Constant(n, -kInf);
    p.upper = Eigen::VectorXd::Constant(n, kInf);
    return p;
}

void QPProblem::validate() const {
    const auto n = H.rows();
    if (H.cols() != n || f.size() != n || lower.size() != n || upper.size() != n ||
        A.cols() != n || b.size() != A.rows())
        throw std::invalid_argument("QPProblem: inconsistent dimensions");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("QPProblem: H not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("QPProblem: H not positive definite");
}

QPSolution solve_qp(const QPProblem& problem, double tolerance, int max_iterations) {
    problem.validate();
    const int n = static_cast<int>(problem.H.rows());
    const Rows rows = stack_rows(problem);

    // Start from the unconstrained minimiser clamped into the box.
    Eigen::VectorXd x0 = problem.H.ldlt().solve(-problem.f);
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(problem.lower(j))) x0(j) = std::max(x0(j), problem.lower(j));
        if (std::isfinite(problem.upper(j))) x0(j) = std::min(x0(j), problem.upper(j));
    }

    QPSolution out;
    int phase1_iters = 0;
    if (max_violation(rows, x0) > tolerance) {
        // Phase I: minimise an elastic bound s on the violation of every row.
        // (x0, s0) with s0 above the worst violation is feasible by
        // construction, so the same active-set core applies.
        const double eps = 1e-4;
        Eigen::MatrixXd Ha = eps * Eigen::MatrixXd::Identity(n + 1, n + 1);
        Eigen::VectorXd fa = Eigen::VectorXd::Zero(n + 1);
        fa(n) = 1.0;

        const int m = static_cast<int>(rows.G.rows());
        Rows aux;
        aux.G = Eigen::MatrixXd::Zero(m + 1, n + 1);
        aux.h = Eigen::VectorXd::Zero(m + 1);
        aux.G.topLeftCorner(m, n) = rows.G;
        aux.G.col(n).head(m).setConstant(-1.0);
        aux.h.head(m) = rows.h;
        aux.G(m, n) = -1.0;  // s >= 0
        aux.h(m) = 0.0;

        Eigen::VectorXd xa(n + 1);
        xa.head(n) = x0;
        xa(n) = max_violation(rows, x0) + 1.0;

        const CoreResult ph1 =
            active_set_core(Ha, fa, aux, xa, tolerance, 4 * max_iterations);
        phase1_iters = ph1.iterations;
        const double s_star = ph1.x(n);
        if (ph1.status != QPStatus::Optimal) {
            out.u = ph1.x.head(n);
            out.objective = 0.5 * out.u.dot(problem.H * out.u) + problem.f.dot(out.u);
            out.status = QPStatus::IterationLimit;
            out.iterations = phase1_iters;
            return out;
        }
        if (s_star > std::max(100.0 * tolerance, 1e-6)) {
            out.u = Eigen::VectorXd::Zero(n);
            out.objective = 0.0;
            out.status = QPStatus::Infeasible;
            out.iterations = phase1_iters;
            return out;
        }
        x0 = ph1.x.head(n);
    }

    const CoreResult main =
        active_set_core(problem.H, problem.f, rows, x0, tolerance, max_iterations);
    out.u = main.x;
    out.objective = 0.5 * main.x.dot(problem.H * main.x) + problem.f.dot(main.x);
    out.status = main.status;
    out.iterations = phase1_iters + main.iterations;
    return out;
}

}  // namespace cbfnav
