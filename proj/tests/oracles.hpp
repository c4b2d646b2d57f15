// Test-only reference implementations, independent of the library's solve
// paths: a projected-gradient + grid-refinement QP oracle, a vertex-
// enumeration feasibility oracle, and finite-difference helpers.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cbfnav/qp_solver.hpp"

namespace oracles {

struct RowSet {
    Eigen::MatrixXd G;  // G x <= h, bounds already materialised as rows
    Eigen::VectorXd h;
};

inline RowSet rows_of(const cbfnav::QPProblem& p) {
    const int n = static_cast<int>(p.H.rows());
    std::vector<std::pair<Eigen::RowVectorXd, double>> rows;
    for (int i = 0; i < p.A.rows(); ++i) rows.emplace_back(p.A.row(i), p.b(i));
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(p.upper(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = 1.0;
            rows.emplace_back(r, p.upper(j));
        }
        if (std::isfinite(p.lower(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = -1.0;
            rows.emplace_back(r, -p.lower(j));
        }
    }
    RowSet rs;
    rs.G.resize(static_cast<int>(rows.size()), n);
    rs.h.resize(static_cast<int>(rows.size()));
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        rs.G.row(i) = rows[i].first;
        rs.h(i) = rows[i].second;
    }
    return rs;
}

inline double qp_objective(const cbfnav::QPProblem& p, const Eigen::VectorXd& x) {
    return 0.5 * x.dot(p.H * x) + p.f.dot(x);
}

inline double max_violation(const RowSet& rs, const Eigen::VectorXd& x) {
    if (rs.G.rows() == 0) return 0.0;
    return (rs.G * x - rs.h).maxCoeff();
}

// Dykstra's algorithm: converges to the Euclidean projection onto the
// intersection of the halfspaces (plain cyclic projection does not).
inline Eigen::VectorXd dykstra_project(const RowSet& rs, const Eigen::VectorXd& x0,
                                       int sweeps = 60) {
    const int m = static_cast<int>(rs.G.rows());
    Eigen::VectorXd x = x0;
    Eigen::MatrixXd corrections = Eigen::MatrixXd::Zero(m, x0.size());
    for (int s = 0; s < sweeps; ++s) {
        for (int i = 0; i < m; ++i) {
            const Eigen::VectorXd y = x + corrections.row(i).transpose();
            const double viol = rs.G.row(i) * y - rs.h(i);
            Eigen::VectorXd xn = y;
            if (viol > 0.0)
                xn -= rs.G.row(i).transpose() * (viol / rs.G.row(i).squaredNorm());
            corrections.row(i) = (y - xn).transpose();
            x = xn;
        }
    }
    return x;
}

// Exhaustive brute force over every independent active subset of rows
// (sizes 0..n): each equality-constrained candidate is checked for primal
// feasibility and the best feasible one is the exact optimum of a strictly
// convex QP. No pivoting path is shared with the solver under test.
inline Eigen::VectorXd enumerate_qp_oracle(const cbfnav::QPProblem& p) {
    const RowSet rs = rows_of(p);
    const int n = static_cast<int>(p.H.rows());
    const int m = static_cast<int>(rs.G.rows());
    Eigen::VectorXd best;
    double best_obj = std::numeric_limits<double>::infinity();

    std::vector<int> subset;
    std::function<void(int)> visit = [&](int from) {
        const int k = static_cast<int>(subset.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
        K.topLeftCorner(n, n) = p.H;
        Eigen::VectorXd rhs(n + k);
        rhs.head(n) = -p.f;
        for (int i = 0; i < k; ++i) {
            K.block(0, n + i, n, 1) = rs.G.row(subset[i]).transpose();
            K.block(n + i, 0, 1, n) = rs.G.row(subset[i]);
            rhs(n + i) = rs.h(subset[i]);
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(rhs).head(n);
            if (max_violation(rs, x) <= 1e-9) {
                const double obj = qp_objective(p, x);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = x;
                }
            }
        }
        if (k == n) return;
        for (int i = from; i < m; ++i) {
            subset.push_back(i);
            visit(i + 1);
            subset.pop_back();
        }
    };
    visit(0);
    return best;  // empty when nothing feasible
}

// Slow reference minimiser: projected gradient descent (Dykstra projections)
// to locate the optimum, then feasible grid refinement around it, with the
// exhaustive enumeration point as a precision backstop.
inline Eigen::VectorXd pgd_grid_oracle(const cbfnav::QPProblem& p,
                                       int pgd_iters = 600) {
    const int n = static_cast<int>(p.H.rows());
    const RowSet rs = rows_of(p);
    const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p.H)
                         .eigenvalues()
                         .maxCoeff();
    const double step = 1.0 / L;

    Eigen::VectorXd x = dykstra_project(rs, Eigen::VectorXd::Zero(n), 200);
    for (int k = 0; k < pgd_iters; ++k)
        x = dykstra_project(rs, x - step * (p.H * x + p.f), 40);
    x = dykstra_project(rs, x, 400);

    // Grid refinement around the PGD point, keeping only feasible samples.
    double box = 2e-2;
    Eigen::VectorXd best = x;
    double best_obj = max_violation(rs, x) <= 0.0
                          ? qp_objective(p, x)
                          : std::numeric_limits<double>::infinity();
    const int steps_per_dim = 9;
    for (int round = 0; round < 45; ++round) {
        const int total = static_cast<int>(std::pow(steps_per_dim, n));
        Eigen::VectorXd candidate(n);
        for (int t = 0; t < total; ++t) {
            int rem = t;
            for (int d = 0; d < n; ++d) {
                const int idx = rem % steps_per_dim;
                rem /= steps_per_dim;
                candidate(d) =
                    best(d) + box * (2.0 * idx / (steps_per_dim - 1) - 1.0);
            }
            if (max_violation(rs, candidate) > 0.0) continue;
            const double obj = qp_objective(p, candidate);
            if (obj < best_obj) {
                best_obj = obj;
                best = candidate;
            }
        }
        box /= 2.0;
    }
    const Eigen::VectorXd exact = enumerate_qp_oracle(p);
    if (exact.size() == n && qp_objective(p, exact) < best_obj) return exact;
    return best;
}

// Exact feasibility of {A x <= b, bounds} for boxed problems: a nonempty
// bounded polyhedron has a vertex, so enumerate all n-subsets of rows, solve
// for their intersection points, and test them against every row.
inline bool lp_feasible(const cbfnav::QPProblem& p, double tol = 1e-9) {
    const RowSet rs = rows_of(p);
    const int n = static_cast<int>(p.H.rows());
    const int m = static_cast<int>(rs.G.rows());
    std::vector<int> idx(n);
    std::function<bool(int, int)> rec = [&](int depth, int from) -> bool {
        if (depth == n) {
            Eigen::MatrixXd M(n, n);
            Eigen::VectorXd rhs(n);
            for (int d = 0; d < n; ++d) {
                M.row(d) = rs.G.row(idx[d]);
                rhs(d) = rs.h(idx[d]);
            }
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (!lu.isInvertible()) return false;
            const Eigen::VectorXd v = lu.solve(rhs);
            return max_violation(rs, v) <= tol;
        }
        for (int i = from; i < m; ++i) {
            idx[depth] = i;
            if (rec(depth + 1, i + 1)) return true;
        }
        return false;
    };
    return rec(0, 0);
}

// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x0,
                           double step = 1e-5) {
    return (f(x0 + step) - f(x0 - step)) / (2.0 * step);
}

}  // namespace oracles
