#pragma once

#include <Eigen/Dense>
#include <limits>

namespace cbfnav {

enum class QPStatus { Optimal, Infeasible, IterationLimit };

const char* to_string(QPStatus s);

// Dense strictly convex QP
//   min 1/2 u'Hu + f'u   s.t.  A u <= b,  lower <= u <= upper.
// Bound entries may be +/-infinity.
struct QPProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd f;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static QPProblem unconstrained(Eigen::MatrixXd H, Eigen::VectorXd f);

    // Throws std::invalid_argument on inconsistent dimensions, asymmetric or
    // non-positive-definite H.
    void validate() const;
};

struct QPSolution {
    Eigen::VectorXd u;
    double objective = 0.0;
    QPStatus status = QPStatus::IterationLimit;
    int iterations = 0;
};

// Primal active-set solver for small dense problems (n <= 4, a few dozen
// rows). Infeasibility is certified through a phase-I subproblem with an
// elastic violation variable. Deterministic: identical inputs give
// bit-identical outputs.
QPSolution solve_qp(const QPProblem& problem, double tolerance = 1e-8,
                    int max_iterations = 100);

}  // namespace cbfnav
