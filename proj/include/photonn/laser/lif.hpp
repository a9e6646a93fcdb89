#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "photonn/error.hpp"
#include "photonn/laser/input_signal.hpp"
#include "photonn/laser/rk4.hpp"
#include "photonn/laser/spikes.hpp"

namespace photonn {

/// Near-threshold reduction of the excitable laser: leaky integration of the
/// gain G toward A, fire-and-reset when G exceeds G_thresh.
struct LifParams {
    double gamma_G = 1.0;     ///< leak rate
    double A = 0.0;           ///< equilibrium level
    double G_thresh = 1.0;    ///< firing threshold
    double G_reset = 0.0;     ///< post-spike level
    double refractory = 0.0;  ///< hold time at G_reset after a spike
    bool allow_self_firing = false;

    void validate() const {
        detail::require(gamma_G > 0.0, "LIF leak rate must be positive");
        detail::require(refractory >= 0.0, "LIF refractory time must be non-negative");
        detail::require(G_reset < G_thresh, "LIF reset level must lie below threshold");
        detail::require(allow_self_firing || G_thresh > A,
                        "LIF threshold at or below equilibrium fires spontaneously");
    }
};

struct LifTrace {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> G;
    SpikeTrain spikes;
};

namespace detail {

inline void check_lif_step(double rate, double dt) {
    if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
    if (dt * rate > 0.1 + 1e-12)
        throw StepSizeError("dt does not resolve the LIF leak rate (need dt*gamma <= 0.1)");
}

/// Integrate-and-fire neuron advanced one grid step at a time. Shared by the
/// standalone simulator and the network co-simulation.
class LifNeuron {
public:
    LifNeuron(const LifParams& p, double G0) : p_(p), G_(G0) {}

    double gain() const { return G_; }
    bool refractory_at(double t) const { return t < hold_until_; }

    /// Adds impulse area at grid time t and fires if the threshold is exceeded.
    /// Returns the pre-reset value when a spike is emitted.
    std::optional<double> kick_and_check(double t, double area) {
        if (refractory_at(t)) return std::nullopt;
        G_ += area;
        if (G_ > p_.G_thresh) {
            const double peak = G_;
            G_ = p_.G_reset;
            hold_until_ = t + p_.refractory;
            return peak;
        }
        return std::nullopt;
    }

    template <typename Theta>
    void step(double t, double dt, Theta&& theta, double drive) {
        if (refractory_at(t + dt - 1e-12 * dt)) {
            G_ = p_.G_reset;
            return;
        }
        const auto rhs = [&](double tau, const StateVector<1>& y) {
            return StateVector<1>{-p_.gamma_G * (y[0] - p_.A) + theta(tau) + drive};
        };
        const StateVector<1> next = rk4_step<1>({G_}, t, dt, rhs);
        if (!std::isfinite(next[0])) throw IntegrationError("non-finite LIF state", t + dt);
        G_ = next[0];
    }

private:
    LifParams p_;
    double G_;
    double hold_until_ = -1.0;
};

}  // namespace detail

/// Integrates dG/dt = -gamma_G (G - A) + theta(t) with fire-and-reset.
/// Spike events carry the pre-reset gain as `peak` and unit energy.
inline LifTrace simulate_lif(const LifParams& params, const InputSignal& input, double dt,
                             double horizon, std::optional<double> G0 = std::nullopt) {
    params.validate();
    detail::check_lif_step(params.gamma_G, dt);
    detail::require(horizon > 0.0, "horizon must be positive");

    const std::size_t n = step_count(dt, horizon);
    LifTrace trace;
    trace.dt = dt;
    trace.t.reserve(n + 1);
    trace.G.reserve(n + 1);

    detail::LifNeuron neuron(params, G0.value_or(params.A));
    ImpulseSchedule schedule(input, dt);
    const auto theta = [&input](double tau) { return input.continuous(tau); };

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (auto peak = neuron.kick_and_check(t, schedule.take(k)))
            trace.spikes.events.push_back({t, *peak, 1.0});
        trace.t.push_back(t);
        trace.G.push_back(neuron.gain());
        if (k == n) break;
        neuron.step(t, dt, theta, 0.0);
    }
    return trace;
}

/// Membrane circuit: C_m dV/dt = -(V - V_L)/R_m + I_app(t).
struct CircuitLif {
    double R_m = 1.0;
    double C_m = 1.0;
    double V_L = 0.0;
    double V_thresh = 1.0;
    double V_reset = 0.0;
    double refractory = 0.0;
};

/// How the applied drive I_app is expressed.
enum class DriveUnits {
    Current,  ///< I_app is a current: theta = I_app / C_m
    Voltage,  ///< I_app is R_m times a current: theta = I_app / (R_m C_m)
};

struct CircuitMapping {
    LifParams params;
    double input_scale = 1.0;  ///< theta(t) = input_scale * I_app(t)
};

/// Maps the membrane circuit onto the laser-gain form:
/// gamma_G = 1/(R_m C_m), A = V_L, G = V_m, thresholds carried over.
inline CircuitMapping lif_from_circuit(const CircuitLif& c, DriveUnits units = DriveUnits::Current) {
    if (!(c.R_m > 0.0) || !(c.C_m > 0.0))
        throw InvalidArgument("membrane resistance and capacitance must be positive");
    CircuitMapping m;
    const double tau = c.R_m * c.C_m;
    m.params.gamma_G = 1.0 / tau;
    m.params.A = c.V_L;
    m.params.G_thresh = c.V_thresh;
    m.params.G_reset = c.V_reset;
    m.params.refractory = c.refractory;
    m.params.allow_self_firing = !(c.V_thresh > c.V_L);
    m.input_scale = units == DriveUnits::Current ? 1.0 / c.C_m : 1.0 / tau;
    return m;
}

/// Runs the mapped model on a circuit drive I_app.
inline LifTrace simulate_mapped_lif(const CircuitMapping& m, const InputSignal& I_app, double dt,
                                    double horizon, std::optional<double> G0 = std::nullopt) {
    return simulate_lif(m.params, I_app.scaled(m.input_scale), dt, horizon, G0);
}

/// Direct integration of the circuit in its own variables (the reference the
/// mapping is checked against). Impulses in I_app are charge (or R_m * charge
/// for voltage-valued drive) deposited on the capacitor.
inline LifTrace simulate_circuit_lif(const CircuitLif& c, const InputSignal& I_app, double dt,
                                     double horizon, DriveUnits units = DriveUnits::Current,
                                     std::optional<double> V0 = std::nullopt) {
    if (!(c.R_m > 0.0) || !(c.C_m > 0.0))
        throw InvalidArgument("membrane resistance and capacitance must be positive");
    detail::check_lif_step(1.0 / (c.R_m * c.C_m), dt);
    detail::require(horizon > 0.0, "horizon must be positive");

    const double drive_div = units == DriveUnits::Current ? 1.0 : c.R_m;
    const std::size_t n = step_count(dt, horizon);
    LifTrace trace;
    trace.dt = dt;
    double V = V0.value_or(c.V_L);
    double hold_until = -1.0;
    ImpulseSchedule schedule(I_app, dt);

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double q = schedule.take(k);
        if (!(t < hold_until)) {
            V += q / drive_div / c.C_m;
            if (V > c.V_thresh) {
                trace.spikes.events.push_back({t, V, 1.0});
                V = c.V_reset;
                hold_until = t + c.refractory;
            }
        }
        trace.t.push_back(t);
        trace.G.push_back(V);
        if (k == n) break;
        if (t + dt - 1e-12 * dt < hold_until) {
            V = c.V_reset;
            continue;
        }
        const auto rhs = [&](double tau, const StateVector<1>& y) {
            return StateVector<1>{(-(y[0] - c.V_L) / c.R_m + I_app.continuous(tau) / drive_div) / c.C_m};
        };
        V = rk4_step<1>({V}, t, dt, rhs)[0];
        if (!std::isfinite(V)) throw IntegrationError("non-finite membrane voltage", t + dt);
    }
    return trace;
}

}  // namespace photonn
