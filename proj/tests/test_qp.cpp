#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cbfnav/qp_solver.hpp"
#include "oracles.hpp"

using namespace cbfnav;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

QPProblem random_qp(std::mt19937& rng, int n, int m, bool force_infeasible) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> margin(0.2, 2.0);

    QPProblem p;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = u(rng);
    p.H = M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    p.f.resize(n);
    for (int i = 0; i < n; ++i) p.f(i) = 3.0 * u(rng);

    // Rows built around an interior point so the feasible instances have a
    // fat interior.
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = 2.0 * u(rng);
    p.A.resize(m, n);
    p.b.resize(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) p.A(i, j) = u(rng);
        if (p.A.row(i).norm() < 0.1) p.A(i, 0) += 0.5;
        p.b(i) = p.A.row(i) * x0 + margin(rng);
    }
    p.lower = Eigen::VectorXd::Constant(n, -10.0);
    p.upper = Eigen::VectorXd::Constant(n, 10.0);

    if (force_infeasible && m >= 2) {
        // Contradictory pair with a unit gap.
        Eigen::RowVectorXd a(n);
        for (int j = 0; j < n; ++j) a(j) = u(rng);
        if (a.norm() < 0.1) a(0) += 1.0;
        const double c = u(rng);
        p.A.row(m - 2) = a;
        p.b(m - 2) = c;
        p.A.row(m - 1) = -a;
        p.b(m - 1) = -c - 1.0;
    }
    return p;
}

}  // namespace

TEST_CASE("active bound example: min u^2/2 s.t. u >= 1") {
    QPProblem p = QPProblem::unconstrained(Eigen::MatrixXd::Identity(1, 1),
                                           Eigen::VectorXd::Zero(1));
    p.A.resize(1, 1);
    p.A << -1.0;
    p.b.resize(1);
    p.b << -1.0;
    const QPSolution s = solve_qp(p);
    REQUIRE(s.status == QPStatus::Optimal);
    CHECK(s.u(0) == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(0.5));
}

TEST_CASE("unconstrained example: min (u-2)^2/2") {
    Eigen::VectorXd f(1);
    f << -2.0;
    const QPSolution s =
        solve_qp(QPProblem::unconstrained(Eigen::MatrixXd::Identity(1, 1), f));
    REQUIRE(s.status == QPStatus::Optimal);
    CHECK(s.u(0) == doctest::Approx(2.0));
}

TEST_CASE("infeasible example: u >= 1 and u <= 0") {
    QPProblem p = QPProblem::unconstrained(Eigen::MatrixXd::Identity(1, 1),
                                           Eigen::VectorXd::Zero(1));
    p.A.resize(2, 1);
    p.A << -1.0, 1.0;
    p.b.resize(2);
    p.b << -1.0, 0.0;
    CHECK(solve_qp(p).status == QPStatus::Infeasible);
}

TEST_CASE("validation rejects bad problems") {
    QPProblem p = QPProblem::unconstrained(Eigen::MatrixXd::Identity(2, 2),
                                           Eigen::VectorXd::Zero(2));
    p.H(0, 1) = 0.5;  // asymmetric
    CHECK_THROWS_AS((void)solve_qp(p), std::invalid_argument);
    p.H(0, 1) = 0.0;
    p.H(0, 0) = -1.0;  // not PD
    CHECK_THROWS_AS((void)solve_qp(p), std::invalid_argument);
    p.H(0, 0) = 1.0;
    p.f.resize(3);  // inconsistent
    CHECK_THROWS_AS((void)solve_qp(p), std::invalid_argument);
}

TEST_CASE("random SPD QPs match the projected-gradient oracle") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const QPProblem p = random_qp(rng, 3, 4, false);
        const QPSolution s = solve_qp(p);
        REQUIRE(s.status == QPStatus::Optimal);
        const Eigen::VectorXd ref = oracles::pgd_grid_oracle(p);
        CHECK(s.objective == doctest::Approx(oracles::qp_objective(p, ref)).epsilon(1e-6));
        const oracles::RowSet rs = oracles::rows_of(p);
        CHECK(oracles::max_violation(rs, s.u) <= 1e-8);
    }
}

TEST_CASE("stationarity: gradient is a non-negative combination of active rows") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const QPProblem p = random_qp(rng, 3, 5, false);
        const QPSolution s = solve_qp(p);
        REQUIRE(s.status == QPStatus::Optimal);
        const oracles::RowSet rs = oracles::rows_of(p);
        const Eigen::VectorXd grad = p.H * s.u + p.f;

        std::vector<int> active;
        for (int i = 0; i < rs.G.rows(); ++i)
            if (std::fabs(rs.G.row(i) * s.u - rs.h(i)) <= 1e-6) active.push_back(i);
        if (active.empty()) {
            CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-6);
            continue;
        }
        Eigen::MatrixXd Gt(static_cast<int>(active.size()), 3);
        for (std::size_t k = 0; k < active.size(); ++k)
            Gt.row(static_cast<int>(k)) = rs.G.row(active[k]);
        // grad = -G_active' lambda with lambda >= 0.
        const Eigen::VectorXd lambda =
            Gt.transpose().colPivHouseholderQr().solve(-grad);
        CHECK((Gt.transpose() * lambda + grad).lpNorm<Eigen::Infinity>() <= 1e-6);
        CHECK(lambda.minCoeff() >= -1e-6);
    }
}

TEST_CASE("objective scaling leaves the argmin unchanged") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        QPProblem p = random_qp(rng, 3, 5, false);
        const QPSolution s1 = solve_qp(p);
        QPProblem scaled = p;
        scaled.H *= 7.5;
        scaled.f *= 7.5;
        const QPSolution s2 = solve_qp(scaled);
        REQUIRE(s1.status == QPStatus::Optimal);
        REQUIRE(s2.status == QPStatus::Optimal);
        CHECK((s1.u - s2.u).lpNorm<Eigen::Infinity>() <= 1e-7);
    }
}

TEST_CASE("deterministic: identical inputs give bit-identical outputs") {
    std::mt19937 rng(123);
    const QPProblem p = random_qp(rng, 3, 6, false);
    const QPSolution a = solve_qp(p);
    const QPSolution b = solve_qp(p);
    REQUIRE(a.u.size() == b.u.size());
    for (int i = 0; i < a.u.size(); ++i) CHECK(a.u(i) == b.u(i));
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("infeasible random instances agree with the vertex-enumeration oracle") {
    std::mt19937 rng(2024);
    int infeasible_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const QPProblem p = random_qp(rng, 3, 6, trial % 2 == 1);
        const bool feasible = oracles::lp_feasible(p);
        const QPSolution s = solve_qp(p);
        if (!feasible) {
            ++infeasible_seen;
            CHECK(s.status == QPStatus::Infeasible);
        } else {
            CHECK(s.status == QPStatus::Optimal);
        }
    }
    CHECK(infeasible_seen > 50);
}

TEST_CASE("an exhausted iteration budget reports IterationLimit") {
    std::mt19937 rng(11);
    const QPProblem p = random_qp(rng, 3, 5, false);
    CHECK(solve_qp(p, 1e-8, 0).status == QPStatus::IterationLimit);
}

TEST_CASE("bounds-only problem with infinite entries") {
    Eigen::VectorXd f(2);
    f << -10.0, 3.0;
    QPProblem p = QPProblem::unconstrained(Eigen::MatrixXd::Identity(2, 2), f);
    p.upper(0) = 2.0;  // binds: unconstrained optimum would be 10
    p.lower(1) = -kInf;
    const QPSolution s = solve_qp(p);
    REQUIRE(s.status == QPStatus::Optimal);
    CHECK(s.u(0) == doctest::Approx(2.0));
    CHECK(s.u(1) == doctest::Approx(-3.0));
}
