#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "photonn/error.hpp"

namespace photonn {

/// minimize 1/2 x'Qx + c'x subject to lower <= x <= upper.
struct QpProblem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::Index size() const { return c.size(); }

    void validate() const {
        const auto n = c.size();
        detail::require(n > 0, "QP needs at least one variable");
        detail::require(Q.rows() == n && Q.cols() == n, "Q must be N x N");
        detail::require(lower.size() == n && upper.size() == n, "bounds must have N entries");
        detail::require(Q.allFinite() && c.allFinite(), "Q and c must be finite");
        const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
        detail::require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "Q must be symmetric");
        for (Eigen::Index i = 0; i < n; ++i)
            detail::require(lower(i) < upper(i), "bounds must satisfy lower < upper");
    }

    double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return Q * x + c; }
    Eigen::VectorXd clip(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

    /// Infinity norm of the projected-gradient step x - clip(x - grad).
    double stationarity(const Eigen::VectorXd& x) const {
        return (x - clip(x - gradient(x))).cwiseAbs().maxCoeff();
    }

    static QpProblem box(Eigen::MatrixXd Q, Eigen::VectorXd c, double lo, double hi) {
        const auto n = c.size();
        return {std::move(Q), std::move(c), Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
    }
};

/// Random SPD instance on [-1, 1]^n with eigenvalues spread log-uniformly over
/// [1, condition] and a minimizer drawn inside [-0.5, 0.5]^n.
inline QpProblem random_spd_problem(Eigen::Index n, std::uint64_t seed, double condition = 100.0) {
    detail::require(n > 0, "problem size must be positive");
    detail::require(condition >= 1.0, "condition number must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = g(rng);
    const Eigen::MatrixXd U = G.householderQr().householderQ();
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i)
        lambda(i) = n == 1 ? 1.0 : std::pow(condition, static_cast<double>(i) / static_cast<double>(n - 1));
    Eigen::MatrixXd Q = U * lambda.asDiagonal() * U.transpose();
    Q = 0.5 * (Q + Q.transpose());
    Eigen::VectorXd xstar(n);
    for (Eigen::Index i = 0; i < n; ++i) xstar(i) = u(rng);
    return QpProblem::box(Q, -Q * xstar, -1.0, 1.0);
}

/// Adds A x <= b through slack variables s in [0, slack_upper] and the penalty
/// rho/2 |A x + s - b|^2. The returned problem is over (x, s).
inline QpProblem with_inequality_penalty(const QpProblem& p, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                         double rho, double slack_upper) {
    p.validate();
    const auto n = p.size();
    const auto m = b.size();
    detail::require(A.rows() == m && A.cols() == n, "constraint matrix must be M x N");
    detail::require(rho > 0.0, "penalty weight must be positive");
    detail::require(slack_upper > 0.0, "slack bound must be positive");
    QpProblem out;
    out.Q = Eigen::MatrixXd::Zero(n + m, n + m);
    out.Q.topLeftCorner(n, n) = p.Q + rho * A.transpose() * A;
    out.Q.topRightCorner(n, m) = rho * A.transpose();
    out.Q.bottomLeftCorner(m, n) = rho * A;
    out.Q.bottomRightCorner(m, m) = rho * Eigen::MatrixXd::Identity(m, m);
    out.Q = 0.5 * (out.Q + out.Q.transpose());
    out.c.resize(n + m);
    out.c.head(n) = p.c - rho * A.transpose() * b;
    out.c.tail(m) = -rho * b;
    out.lower.resize(n + m);
    out.upper.resize(n + m);
    out.lower << p.lower, Eigen::VectorXd::Zero(m);
    out.upper << p.upper, Eigen::VectorXd::Constant(m, slack_upper);
    return out;
}

}  // namespace photonn
