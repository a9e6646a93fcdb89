#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "photonn/error.hpp"
#include "photonn/laser/input_signal.hpp"
#include "photonn/laser/rk4.hpp"
#include "photonn/laser/spikes.hpp"

namespace photonn {

/// Two-section gain/saturable-absorber laser in dimensionless units
/// (time measured in photon lifetimes when gamma_I = 1).
///
/// The defaults sit in the excitable regime: a single stable off state, an
/// input threshold near 0.27, stereotyped pulses, and a refractory window of a
/// few tens of time units.
struct YamadaParams {
    double A = 6.85;         ///< gain bias (pump)
    double B = 5.9;          ///< absorption level
    double a = 2.0;          ///< differential absorption relative to differential gain
    double gamma_G = 0.05;   ///< gain relaxation rate
    double gamma_Q = 0.25;   ///< absorber relaxation rate
    double gamma_I = 1.0;    ///< inverse photon lifetime
    double epsilon = 1e-6;   ///< spontaneous emission coefficient, f(G) = G

    void validate() const {
        detail::require(gamma_G > 0.0 && gamma_Q > 0.0 && gamma_I > 0.0,
                        "Yamada rates must be strictly positive");
        detail::require(a > 0.0, "Yamada differential absorption a must be positive");
        detail::require(epsilon >= 0.0, "Yamada epsilon must be non-negative");
        detail::require(std::isfinite(A) && std::isfinite(B), "Yamada A and B must be finite");
    }

    double max_rate() const { return std::max({gamma_G, gamma_Q, gamma_I}); }
};

struct YamadaState {
    double G = 0.0;  ///< gain
    double Q = 0.0;  ///< absorption
    double I = 0.0;  ///< intensity

    friend bool operator==(const YamadaState&, const YamadaState&) = default;
};

/// Right-hand side of the gain/absorber/intensity equations.
inline YamadaState yamada_derivative(const YamadaState& s, const YamadaParams& p, double theta) {
    return {
        p.gamma_G * (p.A - s.G - s.G * s.I) + theta,
        p.gamma_Q * (p.B - s.Q - p.a * s.Q * s.I),
        p.gamma_I * (s.G - s.Q - 1.0) * s.I + p.epsilon * s.G,
    };
}

/// Steady state with no input. With epsilon = 0 this is exactly (A, B, 0).
inline YamadaState rest_state(const YamadaParams& p) {
    YamadaState s{p.A, p.B, 0.0};
    if (p.epsilon == 0.0) return s;
    for (int it = 0; it < 200; ++it) {
        const double net_loss = p.gamma_I * (1.0 + s.Q - s.G);
        if (net_loss <= 0.0) break;  // above lasing threshold: no dark rest state
        s.I = p.epsilon * s.G / net_loss;
        s.G = p.A / (1.0 + s.I);
        s.Q = p.B / (1.0 + p.a * s.I);
    }
    return s;
}

namespace detail {

inline void check_yamada_step(const YamadaParams& p, double dt) {
    if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
    if (dt * p.max_rate() > 0.1 + 1e-12)
        throw StepSizeError("dt does not resolve the fastest Yamada rate (need dt*max(gamma) <= 0.1)");
}

/// One RK4 step with the continuous input `theta(t)` plus a constant `drive`
/// held over the step; the intensity is clamped at zero afterwards.
template <typename Theta>
YamadaState yamada_step(const YamadaState& s, const YamadaParams& p, double t, double dt,
                        Theta&& theta, double drive) {
    const auto rhs = [&](double tau, const StateVector<3>& y) {
        const YamadaState d = yamada_derivative({y[0], y[1], y[2]}, p, theta(tau) + drive);
        return StateVector<3>{d.G, d.Q, d.I};
    };
    const StateVector<3> next = rk4_step<3>({s.G, s.Q, s.I}, t, dt, rhs);
    if (!all_finite(next)) throw IntegrationError("non-finite Yamada state", t + dt);
    return {next[0], next[1], std::max(next[2], 0.0)};
}

}  // namespace detail

/// Intensity threshold and merge window used to turn a trace into spikes.
struct SpikeDetection {
    double threshold = 1.0;
    double dead_time = 0.0;
};

struct YamadaTrajectory {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<YamadaState> states;
    SpikeTrain spikes;

    std::vector<double> intensity() const {
        std::vector<double> out;
        out.reserve(states.size());
        for (const auto& s : states) out.push_back(s.I);
        return out;
    }
};

struct YamadaRunOptions {
    std::optional<YamadaState> initial;  ///< defaults to rest_state(params)
    SpikeDetection detection;
};

/// Fixed-step RK4 integration over [0, horizon].
///
/// At every grid time t_k the due impulses are added to G, the state is
/// recorded, and one step is taken. Requires dt*max(gamma) <= 0.1.
inline YamadaTrajectory simulate_yamada(const YamadaParams& params, const InputSignal& input,
                                        double dt, double horizon,
                                        const YamadaRunOptions& options = {}) {
    params.validate();
    detail::check_yamada_step(params, dt);
    detail::require(horizon > 0.0, "horizon must be positive");

    const std::size_t n = step_count(dt, horizon);
    YamadaTrajectory traj;
    traj.dt = dt;
    traj.t.reserve(n + 1);
    traj.states.reserve(n + 1);

    YamadaState s = options.initial.value_or(rest_state(params));
    ImpulseSchedule schedule(input, dt);
    const auto theta = [&input](double tau) { return input.continuous(tau); };

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        s.G += schedule.take(k);
        traj.t.push_back(t);
        traj.states.push_back(s);
        if (k == n) break;
        s = detail::yamada_step(s, params, t, dt, theta, 0.0);
    }
    const auto I = traj.intensity();
    traj.spikes = detect_spikes(I, dt, options.detection.threshold, options.detection.dead_time);
    return traj;
}

}  // namespace photonn
