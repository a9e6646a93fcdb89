#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/laser/input_signal.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/weightbank/accuracy.hpp"

namespace photonn {

/// Linear re-emitter used to move signals between broadcast loops:
/// output = max(0, weighted sum of its inputs).
struct RelayNode {};

/// Continuous (non-spiking) node: output = clip(weighted sum + bias, lower, upper).
struct ClipNode {
    double lower = -1.0;
    double upper = 1.0;
    double bias = 0.0;
    double initial = 0.0;
};

using NeuronModel = std::variant<YamadaParams, LifParams, RelayNode, ClipNode>;

/// One processing node: it filters the loop it listens on and emits on its
/// own carrier into `emit_loop` (the same loop unless it is an export node).
struct NetworkNode {
    NeuronModel model = YamadaParams{};
    double wavelength = 1550.0;  ///< carrier on the emit loop, nm
    int loop = 0;                ///< broadcast loop the node listens on
    std::optional<int> emit_loop;
    InputSignal external;
    std::optional<YamadaState> initial_state;  ///< Yamada nodes only
    std::optional<double> initial_gain;        ///< LIF nodes only

    int emits_on() const { return emit_loop.value_or(loop); }
};

/// Per-loop channel budget set by the weight-bank finesse.
struct LoopCapacity {
    double finesse = 368.0;
    double spacing_linewidths = 3.41;

    std::size_t limit() const {
        return static_cast<std::size_t>(max_channel_count(finesse, spacing_linewidths));
    }
};

/// Broadcast-and-weight network. weights(i, j) is the weight of node j's
/// output into node i; delays are in time units and rounded to the grid.
struct NetworkSpec {
    std::vector<NetworkNode> nodes;
    Eigen::MatrixXd weights;
    std::optional<Eigen::MatrixXd> edge_delays;  ///< per edge; 0 entries use the default
    std::optional<double> propagation_delay;     ///< default: one time step
    double drive_gain = 1.0;                     ///< photocurrent to pump perturbation
    double output_coupling = 1.0;                ///< laser intensity to emitted power
    SpikeDetection detection{};
    LoopCapacity capacity{};

    std::size_t size() const { return nodes.size(); }
};

/// Checks weights, wavelength allocation, loop wiring and channel capacity.
inline void validate(const NetworkSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.size());
    detail::require(spec.weights.rows() == n && spec.weights.cols() == n,
                    "weight matrix must be N x N");
    if (spec.edge_delays) {
        detail::require(spec.edge_delays->rows() == n && spec.edge_delays->cols() == n,
                        "delay matrix must be N x N");
        detail::require((spec.edge_delays->array() >= 0.0).all(), "edge delays must be non-negative");
    }
    if (spec.propagation_delay) detail::require(*spec.propagation_delay > 0.0, "propagation delay must be positive");
    detail::require(std::isfinite(spec.drive_gain), "drive gain must be finite");
    detail::require(spec.output_coupling > 0.0, "output coupling must be positive");

    std::map<int, std::set<double>> carriers;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& node = spec.nodes[static_cast<std::size_t>(i)];
        if (!carriers[node.emits_on()].insert(node.wavelength).second)
            throw InvalidArgument("duplicate wavelength " + std::to_string(node.wavelength) + " on loop " +
                                  std::to_string(node.emits_on()));
        std::visit([](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, YamadaParams> || std::is_same_v<T, LifParams>) m.validate();
            if constexpr (std::is_same_v<T, ClipNode>)
                detail::require(m.lower < m.upper, "clip node bounds must satisfy lower < upper");
        }, node.model);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = spec.weights(i, j);
            detail::require(std::isfinite(w) && w >= -1.0 && w <= 1.0,
                            "weight (" + std::to_string(i) + "," + std::to_string(j) + ") outside [-1, 1]");
            if (w != 0.0 && spec.nodes[static_cast<std::size_t>(j)].emits_on() != node.loop)
                throw InvalidArgument("node " + std::to_string(i) + " cannot hear node " + std::to_string(j) +
                                      ": they are on different loops");
        }
    }
    const std::size_t limit = spec.capacity.limit();
    for (const auto& [loop, set] : carriers)
        if (set.size() > limit)
            throw CapacityError("loop " + std::to_string(loop) + " carries " + std::to_string(set.size()) +
                                " channels but the weight banks resolve at most " + std::to_string(limit));
}

/// Adds a relay node that listens on `source_loop` through `taps`
/// (weights over the existing nodes) and re-emits on `dest_loop`.
/// Returns the index of the new node.
inline std::size_t add_export_node(NetworkSpec& spec, int source_loop, int dest_loop, double wavelength,
                                   const std::vector<double>& taps) {
    const std::size_t n = spec.size();
    detail::require(taps.size() == n, "export taps need one weight per existing node");
    std::size_t used = 0;
    for (const auto& node : spec.nodes)
        if (node.emits_on() == dest_loop) ++used;
    if (used + 1 > spec.capacity.limit())
        throw CapacityError("destination loop " + std::to_string(dest_loop) + " has no free wavelength slot");

    NetworkNode relay;
    relay.model = RelayNode{};
    relay.wavelength = wavelength;
    relay.loop = source_loop;
    relay.emit_loop = dest_loop;
    spec.nodes.push_back(relay);

    const auto m = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    W.topLeftCorner(m - 1, m - 1) = spec.weights;
    for (std::size_t j = 0; j < n; ++j) W(m - 1, static_cast<Eigen::Index>(j)) = taps[j];
    spec.weights = std::move(W);
    if (spec.edge_delays) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
        D.topLeftCorner(m - 1, m - 1) = *spec.edge_delays;
        spec.edge_delays = std::move(D);
    }
    validate(spec);
    return n;
}

}  // namespace photonn
