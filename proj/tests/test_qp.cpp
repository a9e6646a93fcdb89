#include <catch_amalgamated.hpp>

#include <cmath>

#include "photonn/qp/problem.hpp"
#include "photonn/qp/solver.hpp"

using namespace photonn;
using Catch::Approx;

namespace {

Eigen::VectorXd oracle(const QpProblem& p) { return -p.Q.ldlt().solve(p.c); }

}  // namespace

TEST_CASE("closed-form QP instances", "[qp]") {
    SECTION("identity, no linear term") {
        const auto p = QpProblem::box(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3), -1, 1);
        HopfieldConfig cfg;
        cfg.x0 = Eigen::VectorXd::Constant(3, 0.7);
        const auto s = solve_qp(p, cfg);
        CHECK(s.converged);
        CHECK(s.x.cwiseAbs().maxCoeff() < 1e-6);
        CHECK(s.objective == Approx(0.0).margin(1e-12));
    }
    SECTION("diagonal") {
        Eigen::MatrixXd Q = Eigen::Vector2d(2, 4).asDiagonal();
        const auto p = QpProblem::box(Q, Eigen::Vector2d(-2, -4), -10, 10);
        const auto s = solve_qp(p);
        CHECK(s.converged);
        CHECK(s.x(0) == Approx(1.0).margin(1e-6));
        CHECK(s.x(1) == Approx(1.0).margin(1e-6));
    }
    SECTION("random 8-variable SPD") {
        const auto p = random_spd_problem(8, 99);
        const auto s = solve_qp(p);
        CHECK(s.converged);
        CHECK((s.x - oracle(p)).cwiseAbs().maxCoeff() <= 1e-3);
    }
    SECTION("active bounds satisfy the KKT sign conditions") {
        Eigen::MatrixXd Q = Eigen::Vector2d(1, 1).asDiagonal();
        const auto p = QpProblem::box(Q, Eigen::Vector2d(-5, 3), -1, 1);
        const auto s = solve_qp(p);
        REQUIRE(s.converged);
        CHECK(s.x(0) == 1.0);
        CHECK(s.x(1) == -1.0);
        const Eigen::VectorXd g = p.gradient(s.x);
        CHECK(g(0) <= 0.0);
        CHECK(g(1) >= 0.0);
    }
}

TEST_CASE("QP input validation", "[qp]") {
    Eigen::MatrixXd Q(2, 2);
    Q << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(solve_qp(QpProblem::box(Q, Eigen::Vector2d(0, 0), -1, 1)), InvalidArgument);
    Q << 1, 0, 0, 1;
    CHECK_THROWS_AS(solve_qp(QpProblem::box(Q, Eigen::Vector2d(0, 0), 1, 1)), InvalidArgument);
    CHECK_THROWS_AS(solve_qp(QpProblem::box(Q, Eigen::Vector3d(0, 0, 0), -1, 1)), InvalidArgument);

    HopfieldConfig cfg;
    cfg.max_steps = 3;
    cfg.tolerance = 1e-14;
    const auto s = solve_qp(random_spd_problem(5, 1), cfg);
    CHECK_FALSE(s.converged);
    CHECK(s.steps == 3);
}

TEST_CASE("QP invariants on random instances", "[qp]") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto p = random_spd_problem(2 + static_cast<Eigen::Index>(seed % 9), seed, 50.0);
        HopfieldConfig cfg;
        cfg.record_iterates = true;
        const auto s = solve_qp(p, cfg);
        REQUIRE(s.converged);
        CHECK((s.x - oracle(p)).cwiseAbs().maxCoeff() <= 1e-3);
        for (const auto& x : s.trajectory.iterates) {
            REQUIRE((x.array() >= p.lower.array()).all());
            REQUIRE((x.array() <= p.upper.array()).all());
        }
        const auto rep = convergence_report(s.trajectory, cfg.tolerance);
        REQUIRE(rep.monotone);
        CHECK(*rep.monotone);
        CHECK(rep.steps_to_tolerance == s.steps);
    }
}

TEST_CASE("convergence report", "[qp]") {
    SECTION("already optimal") {
        const auto p = QpProblem::box(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), -1, 1);
        const auto s = solve_qp(p);
        CHECK(s.steps == 0);
        CHECK(convergence_report(s.trajectory, 1e-6).steps_to_tolerance == 0u);
    }
    SECTION("geometric decay of the linear flow") {
        const auto p = QpProblem::box(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3), -1, 1);
        HopfieldConfig cfg;
        cfg.dt = 0.1;
        cfg.x0 = Eigen::VectorXd::Ones(3);
        const auto s = solve_qp(p, cfg);
        const auto& f = s.trajectory.objective;
        REQUIRE(f.size() > 50);
        for (std::size_t k = 1; k < 50; ++k) CHECK(f[k] / f[k - 1] == Approx(0.81).epsilon(1e-12));
    }
    SECTION("non-convex problems skip the monotonicity check") {
        Eigen::MatrixXd Q = Eigen::Vector2d(1, -1).asDiagonal();
        const auto s = solve_qp(QpProblem::box(Q, Eigen::Vector2d(0.1, 0.1), -1, 1));
        CHECK_FALSE(s.convex);
        CHECK_FALSE(convergence_report(s.trajectory, 1e-6).monotone.has_value());
    }
    SECTION("empty trajectory") {
        CHECK_THROWS_AS(convergence_report(QpTrajectory{}, 1e-6), InvalidArgument);
    }
}

TEST_CASE("mapping a QP onto a Hopfield network", "[qp][network]") {
    SECTION("identity") {
        const auto p = QpProblem::box(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, -2, 0.5), -1, 1);
        const auto m = map_qp_to_network(p, 0.5);
        CHECK(m.spec.weights.isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3)));
        CHECK(std::get<ClipNode>(m.spec.nodes[0].model).bias == -0.5);
        CHECK(std::get<ClipNode>(m.spec.nodes[1].model).bias == 1.0);
    }
    SECTION("overflow names the feasible step") {
        Eigen::MatrixXd Q(2, 2);
        Q << 4, 4, 4, 4;
        const auto p = QpProblem::box(Q, Eigen::Vector2d(0, 0), -1, 1);
        try {
            map_qp_to_network(p, 0.6);
            FAIL("expected WeightOverflowError");
        } catch (const WeightOverflowError& e) {
            CHECK(e.eta_max() == Approx(0.25));
            CHECK(std::string(e.what()).find("0.25") != std::string::npos);
        }
        CHECK_NOTHROW(map_qp_to_network(p, 0.25));
    }
    SECTION("network path reaches the solver's fixed point") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto p = random_spd_problem(4, 1000 + seed, 10.0);
            const double eta = std::min(max_feasible_eta(p.Q), 1.0 / eigen_range(p.Q).max);
            HopfieldConfig cfg;
            cfg.dt = eta;
            cfg.tolerance = 1e-12;
            const auto direct = solve_qp(p, cfg);
            REQUIRE(direct.converged);
            const auto net = solve_via_network(map_qp_to_network(p, eta), direct.steps + 10);
            CHECK((net - direct.x).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("penalty transformation for linear inequalities", "[qp]") {
    // minimize (x - 2)^2 subject to x <= 1 inside [-5, 5].
    const auto base = QpProblem::box(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -4.0), -5, 5);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(1);
    double prev_violation = 1e9;
    for (double rho : {1.0, 10.0, 100.0, 1000.0}) {
        const auto s = solve_qp(with_inequality_penalty(base, A, b, rho, 10.0));
        REQUIRE(s.converged);
        const double violation = std::max(0.0, s.x(0) - 1.0);
        CHECK(violation <= prev_violation);
        prev_violation = violation;
    }
    CHECK(prev_violation < 0.01);
    CHECK_THROWS_AS(with_inequality_penalty(base, A, b, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("large instance converges", "[qp]") {
    const auto p = random_spd_problem(100, 7, 100.0);
    HopfieldConfig cfg;
    cfg.tolerance = 1e-6;
    const auto s = solve_qp(p, cfg);
    CHECK(s.converged);
    CHECK(s.steps <= 100000);
    CHECK((s.x - oracle(p)).cwiseAbs().maxCoeff() <= 1e-3);
}
