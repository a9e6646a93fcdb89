#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/network/network.hpp"
#include "photonn/network/spec.hpp"
#include "photonn/qp/problem.hpp"

namespace photonn {

struct HopfieldConfig {
    std::optional<double> dt;          ///< default 1 / lambda_max(Q)
    std::size_t max_steps = 100000;
    double tolerance = 1e-6;           ///< on the projected-gradient infinity norm
    std::optional<Eigen::VectorXd> x0; ///< default: origin clipped to the box
    bool record_iterates = false;
};

struct QpTrajectory {
    std::vector<double> objective;  ///< per iterate, starting with x0
    std::vector<double> stationarity;
    std::vector<Eigen::VectorXd> iterates;  ///< when requested
    bool convex = true;
    double dt = 0.0;

    bool empty() const { return objective.empty(); }
};

struct QpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    QpTrajectory trajectory;
    bool converged = false;
    std::size_t steps = 0;
    bool convex = true;
};

struct Spectrum {
    double min = 0.0;
    double max = 0.0;
};

inline Spectrum eigen_range(const Eigen::MatrixXd& Q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// Projected gradient flow x <- clip(x - dt (Qx + c)), run until the
/// projected-gradient norm drops below tolerance or max_steps is reached.
/// Non-convex Q is allowed and flagged; non-convergence is reported, not thrown.
inline QpSolution solve_qp(const QpProblem& p, const HopfieldConfig& cfg = {}) {
    p.validate();
    detail::require(cfg.tolerance > 0.0, "tolerance must be positive");
    const Spectrum spec = eigen_range(p.Q);
    const double scale = std::max(std::abs(spec.min), std::abs(spec.max));
    QpSolution sol;
    sol.convex = spec.min >= -1e-12 * std::max(scale, 1.0);
    double dt = 1.0;
    if (cfg.dt) {
        detail::require(*cfg.dt > 0.0, "dt must be positive");
        dt = *cfg.dt;
    } else if (scale > 0.0) {
        dt = 1.0 / scale;
    }

    Eigen::VectorXd x = cfg.x0 ? *cfg.x0 : Eigen::VectorXd::Zero(p.size());
    detail::require(x.size() == p.size(), "x0 must have N entries");
    x = p.clip(x);

    QpTrajectory& tr = sol.trajectory;
    tr.convex = sol.convex;
    tr.dt = dt;
    auto record = [&](const Eigen::VectorXd& v, double pg) {
        tr.objective.push_back(p.objective(v));
        tr.stationarity.push_back(pg);
        if (cfg.record_iterates) tr.iterates.push_back(v);
    };

    double pg = p.stationarity(x);
    record(x, pg);
    std::size_t k = 0;
    while (!(pg < cfg.tolerance) && k < cfg.max_steps) {
        x = p.clip(x - dt * p.gradient(x));
        if (!x.allFinite()) throw IntegrationError("QP iterate became non-finite", static_cast<double>(k + 1) * dt);
        ++k;
        pg = p.stationarity(x);
        record(x, pg);
    }
    sol.x = x;
    sol.objective = p.objective(x);
    sol.converged = pg < cfg.tolerance;
    sol.steps = k;
    return sol;
}

struct ConvergenceReport {
    std::optional<std::size_t> steps_to_tolerance;  ///< first iterate below tolerance
    std::vector<double> objective;
    std::optional<bool> monotone;  ///< empty when the problem is non-convex (check skipped)
};

inline ConvergenceReport convergence_report(const QpTrajectory& tr, double tolerance) {
    if (tr.empty()) throw InvalidArgument("convergence report needs a non-empty trajectory");
    detail::require(tolerance > 0.0, "tolerance must be positive");
    ConvergenceReport r;
    r.objective = tr.objective;
    for (std::size_t k = 0; k < tr.stationarity.size(); ++k)
        if (tr.stationarity[k] < tolerance) {
            r.steps_to_tolerance = k;
            break;
        }
    if (tr.convex) {
        bool mono = true;
        for (std::size_t k = 1; k < tr.objective.size(); ++k) {
            const double slack = 1e-12 * std::max(1.0, std::abs(tr.objective[k - 1]));
            if (tr.objective[k] > tr.objective[k - 1] + slack) mono = false;
        }
        r.monotone = mono;
    }
    return r;
}

/// Raised when I - eta Q has an entry outside [-1, 1].
class WeightOverflowError : public InvalidArgument {
public:
    WeightOverflowError(double eta, double eta_max)
        : InvalidArgument("eta = " + std::to_string(eta) + " puts Hopfield weights outside [-1, 1]; use eta <= " +
                          std::to_string(eta_max)),
          eta_max_(eta_max) {}

    double eta_max() const noexcept { return eta_max_; }

private:
    double eta_max_;
};

/// Largest eta with every entry of I - eta Q inside [-1, 1].
inline double max_feasible_eta(const Eigen::MatrixXd& Q) {
    double eta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < Q.rows(); ++i)
        for (Eigen::Index j = 0; j < Q.cols(); ++j) {
            const double q = Q(i, j);
            if (i == j) {
                if (q > 0.0) eta = std::min(eta, 2.0 / q);
            } else if (q != 0.0) {
                eta = std::min(eta, 1.0 / std::abs(q));
            }
        }
    return eta;
}

struct MappedQp {
    NetworkSpec spec;
    double eta = 0.0;
    double eta_max = 0.0;
};

/// Continuous Hopfield network whose synchronous update
/// x <- clip((I - eta Q) x - eta c) is one projected-gradient step of size eta.
inline MappedQp map_qp_to_network(const QpProblem& p, double eta, const Eigen::VectorXd* x0 = nullptr) {
    p.validate();
    detail::require(eta > 0.0, "eta must be positive");
    const double eta_max = max_feasible_eta(p.Q);
    const auto n = p.size();
    const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(n, n) - eta * p.Q;
    if (W.cwiseAbs().maxCoeff() > 1.0) throw WeightOverflowError(eta, eta_max);

    MappedQp m;
    m.eta = eta;
    m.eta_max = eta_max;
    m.spec.weights = W;
    m.spec.nodes.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        ClipNode node;
        node.lower = p.lower(i);
        node.upper = p.upper(i);
        node.bias = -eta * p.c(i);
        node.initial = x0 ? (*x0)(i) : 0.0;
        auto& nn = m.spec.nodes[static_cast<std::size_t>(i)];
        nn.model = node;
        nn.wavelength = 1550.0 + 0.1 * static_cast<double>(i);
    }
    return m;
}

/// Runs the mapped network for `steps` synchronous updates and returns the
/// final node outputs.
inline Eigen::VectorXd solve_via_network(const MappedQp& m, std::size_t steps) {
    detail::require(steps > 0, "network solve needs at least one step");
    const auto r = simulate_network(build_network(m.spec, {WeightMode::Ideal, {}}), 1.0, static_cast<double>(steps));
    Eigen::VectorXd x(static_cast<Eigen::Index>(m.spec.size()));
    for (std::size_t i = 0; i < m.spec.size(); ++i) x(static_cast<Eigen::Index>(i)) = r.output[i].back();
    return x;
}

}  // namespace photonn
