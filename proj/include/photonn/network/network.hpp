#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/spikes.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/network/spec.hpp"
#include "photonn/weightbank/bank.hpp"
#include "photonn/weightbank/bench.hpp"
#include "photonn/weightbank/calibration.hpp"

namespace photonn {

enum class WeightMode {
    Physical,  ///< weights realised by calibrated ring weight banks
    Ideal,     ///< weight matrix used as given
};

struct BuildOptions {
    WeightMode mode = WeightMode::Physical;
    BankDesign bank{};  ///< template for every node's weight bank
};

/// A validated network with the weight matrix each node actually applies.
struct Network {
    NetworkSpec spec;
    WeightMode mode = WeightMode::Physical;
    Eigen::MatrixXd effective_weights;
    std::map<int, CalibrationModel> calibrations;  ///< per listen loop (physical mode)

    std::size_t size() const { return spec.size(); }
};

/// Validates the description and, in physical mode, tunes one weight bank per node.
///
/// Every node listening on a loop uses an identical bank whose rings track the
/// carriers present on that loop; the bank is calibrated once per loop and
/// each node's row is then applied through the calibration model.
inline Network build_network(const NetworkSpec& spec, const BuildOptions& opt = {}) {
    validate(spec);
    Network net;
    net.spec = spec;
    net.mode = opt.mode;
    net.effective_weights = spec.weights;
    if (opt.mode == WeightMode::Ideal) return net;

    std::map<int, std::vector<std::size_t>> emitters;
    for (std::size_t j = 0; j < spec.size(); ++j) emitters[spec.nodes[j].emits_on()].push_back(j);
    for (auto& [loop, idx] : emitters)
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return spec.nodes[a].wavelength < spec.nodes[b].wavelength;
        });

    std::map<int, WeightBank> banks;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const int loop = spec.nodes[i].loop;
        const auto it = emitters.find(loop);
        if (it == emitters.end()) continue;
        const auto& src = it->second;
        if (!banks.count(loop)) {
            std::vector<double> carriers;
            for (std::size_t j : src) carriers.push_back(spec.nodes[j].wavelength);
            banks.emplace(loop, make_bank(opt.bank, carriers));
            SimulatedBench bench(banks.at(loop));
            net.calibrations.emplace(loop, calibrate_model_based(bench));
        }
        Eigen::VectorXd row(static_cast<Eigen::Index>(src.size()));
        for (std::size_t k = 0; k < src.size(); ++k)
            row(static_cast<Eigen::Index>(k)) = spec.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(src[k]));
        try {
            const auto applied = apply_weights(banks.at(loop), net.calibrations.at(loop), row);
            for (std::size_t k = 0; k < src.size(); ++k)
                net.effective_weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(src[k])) =
                    applied.achieved(static_cast<Eigen::Index>(k));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("node " + std::to_string(i) + ": " + e.what());
        }
    }
    return net;
}

struct NetworkResult {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<std::vector<double>> output;          ///< emitted power per node per step
    std::vector<std::vector<YamadaState>> yamada;     ///< Yamada nodes only
    std::vector<std::vector<double>> membrane;        ///< LIF gain, or relay/clip output
    std::vector<SpikeTrain> spikes;

    std::size_t total_spikes() const {
        std::size_t n = 0;
        for (const auto& s : spikes) n += s.size();
        return n;
    }
};

namespace detail {

struct Synapse {
    std::size_t source;
    double weight;
    std::size_t delay;  ///< steps, >= 1
};

inline std::size_t delay_steps(double delay, double dt) {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(delay / dt)));
}

}  // namespace detail

/// Synchronous fixed-step co-simulation over [0, horizon].
///
/// At grid step k every node first receives sum_j w_ij P_j(k - d_ij), where P
/// is emitted power and d_ij >= 1 step. Yamada nodes add the due external
/// impulses to G, record, and integrate one RK4 step with the pump perturbation
/// external(t) + gain * input held over the step. LIF nodes take
/// gain * input as an impulse. Relay and clip nodes respond instantaneously.
inline NetworkResult simulate_network(const Network& net, double dt, double horizon) {
    const NetworkSpec& spec = net.spec;
    const std::size_t n = spec.size();
    detail::require(horizon > 0.0, "horizon must be positive");
    if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
    for (const auto& node : spec.nodes) {
        if (const auto* y = std::get_if<YamadaParams>(&node.model)) detail::check_yamada_step(*y, dt);
        if (const auto* l = std::get_if<LifParams>(&node.model)) detail::check_lif_step(l->gamma_G, dt);
    }

    // Inputs summed in a label-independent order (by source loop, then carrier)
    // so relabelling nodes cannot change rounding.
    const std::size_t default_delay = spec.propagation_delay ? detail::delay_steps(*spec.propagation_delay, dt) : 1;
    std::vector<std::vector<detail::Synapse>> inputs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const double w = net.effective_weights(ii, jj);
            if (w == 0.0) continue;
            std::size_t d = default_delay;
            if (spec.edge_delays && (*spec.edge_delays)(ii, jj) > 0.0)
                d = detail::delay_steps((*spec.edge_delays)(ii, jj), dt);
            inputs[i].push_back({j, w, d});
        }
        std::sort(inputs[i].begin(), inputs[i].end(), [&](const auto& a, const auto& b) {
            const auto& na = spec.nodes[a.source];
            const auto& nb = spec.nodes[b.source];
            return std::make_tuple(na.emits_on(), na.wavelength) < std::make_tuple(nb.emits_on(), nb.wavelength);
        });
    }

    const std::size_t steps = step_count(dt, horizon);
    NetworkResult res;
    res.dt = dt;
    res.t.reserve(steps + 1);
    res.output.assign(n, {});
    res.yamada.assign(n, {});
    res.membrane.assign(n, {});
    res.spikes.assign(n, {});

    std::vector<YamadaState> ystate(n);
    std::vector<std::optional<detail::LifNeuron>> lif(n);
    std::vector<ImpulseSchedule> schedules;
    std::vector<double> initial_output(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = spec.nodes[i];
        schedules.emplace_back(node.external, dt);
        res.output[i].reserve(steps + 1);
        if (const auto* y = std::get_if<YamadaParams>(&node.model)) {
            ystate[i] = node.initial_state.value_or(rest_state(*y));
            initial_output[i] = spec.output_coupling * ystate[i].I;
            res.yamada[i].reserve(steps + 1);
        } else if (const auto* l = std::get_if<LifParams>(&node.model)) {
            lif[i].emplace(*l, node.initial_gain.value_or(l->A));
        } else if (const auto* c = std::get_if<ClipNode>(&node.model)) {
            initial_output[i] = std::clamp(c->initial, c->lower, c->upper);
        }
    }

    std::vector<double> drive(n, 0.0);
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        for (std::size_t i = 0; i < n; ++i) {
            double u = 0.0;
            for (const auto& s : inputs[i])
                u += s.weight * (k < s.delay ? initial_output[s.source] : res.output[s.source][k - s.delay]);
            drive[i] = u;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& node = spec.nodes[i];
            const double ext = schedules[i].take(k);
            double P = 0.0;
            if (std::holds_alternative<YamadaParams>(node.model)) {
                ystate[i].G += ext;
                res.yamada[i].push_back(ystate[i]);
                P = spec.output_coupling * ystate[i].I;
            } else if (lif[i]) {
                if (auto peak = lif[i]->kick_and_check(t, ext + spec.drive_gain * drive[i])) {
                    res.spikes[i].events.push_back({t, *peak, 1.0});
                    P = spec.output_coupling;
                }
                res.membrane[i].push_back(lif[i]->gain());
            } else if (const auto* c = std::get_if<ClipNode>(&node.model)) {
                P = k == 0 ? initial_output[i] : std::clamp(drive[i] + c->bias + ext, c->lower, c->upper);
                res.membrane[i].push_back(P);
            } else {
                P = std::max(0.0, drive[i] + ext);
                res.membrane[i].push_back(P);
            }
            res.output[i].push_back(P);
        }
        res.t.push_back(t);
        if (k == steps) break;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& node = spec.nodes[i];
            const auto theta = [&node](double tau) { return node.external.continuous(tau); };
            if (const auto* y = std::get_if<YamadaParams>(&node.model))
                ystate[i] = detail::yamada_step(ystate[i], *y, t, dt, theta, spec.drive_gain * drive[i]);
            else if (lif[i])
                lif[i]->step(t, dt, theta, 0.0);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (res.yamada[i].empty()) continue;
        std::vector<double> I;
        I.reserve(res.yamada[i].size());
        for (const auto& s : res.yamada[i]) I.push_back(s.I);
        res.spikes[i] = detect_spikes(I, dt, spec.detection.threshold, spec.detection.dead_time);
    }
    return res;
}

}  // namespace photonn
