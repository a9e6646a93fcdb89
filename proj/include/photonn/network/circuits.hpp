#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/laser/input_signal.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/network/spec.hpp"

namespace photonn {

/// Coincidence-detector chain for a temporal spike pattern.
///
/// Node 0 fires on every input spike. Node k fires only when an input spike
/// coincides with node k-1's spike delayed by intervals[k-1]: each alone is
/// sub-threshold, together they cross. The last node therefore fires iff the
/// input contains spikes separated by the configured intervals in order.
struct PatternCircuit {
    NetworkSpec spec;
    std::size_t output = 0;
    double input_area = 1.5;  ///< input spike area seen by node 0
    double sub_area = 0.6;    ///< input spike area seen by nodes 1..n

    /// Copy of the network with the given input spike times applied to every node.
    NetworkSpec with_input(const std::vector<double>& spike_times) const {
        NetworkSpec s = spec;
        for (std::size_t i = 0; i < s.size(); ++i) {
            InputSignal in;
            for (double t : spike_times) in.add_impulse(t, i == 0 ? input_area : sub_area);
            s.nodes[i].external = in;
        }
        return s;
    }
};

struct PatternOptions {
    double leak = 1.0;        ///< LIF leak rate; the coincidence window is ~ln(1.5)/leak
    double refractory = 0.5;
    double coupling = 0.6;    ///< chain weight (impulse area per upstream spike)
};

inline PatternCircuit pattern_recognition_circuit(const std::vector<double>& intervals,
                                                  const PatternOptions& opt = {}) {
    detail::require(!intervals.empty(), "pattern needs at least one interval");
    for (double d : intervals) {
        detail::require(d > 0.0, "pattern intervals must be positive");
        if (d <= opt.refractory)
            throw InvalidArgument("pattern interval " + std::to_string(d) +
                                  " is shorter than the refractory period");
    }
    LifParams lif;
    lif.gamma_G = opt.leak;
    lif.A = 0.0;
    lif.G_thresh = 1.0;
    lif.G_reset = 0.0;
    lif.refractory = opt.refractory;

    const std::size_t n = intervals.size() + 1;
    PatternCircuit c;
    c.sub_area = opt.coupling;
    c.output = n - 1;
    c.spec.nodes.resize(n);
    c.spec.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    c.spec.edge_delays = c.spec.weights;
    for (std::size_t i = 0; i < n; ++i) {
        c.spec.nodes[i].model = lif;
        c.spec.nodes[i].wavelength = 1550.0 + static_cast<double>(i);
    }
    for (std::size_t k = 1; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        c.spec.weights(i, i - 1) = opt.coupling;
        (*c.spec.edge_delays)(i, i - 1) = intervals[k - 1];
    }
    return c;
}

/// Two excitable lasers exciting each other through weight w. The round-trip
/// delay must outlast the refractory window for activity to persist.
struct RecurrentOptions {
    double drive_gain = 0.003;
    double propagation_delay = 50.0;
    double seed_time = 5.0;
    double seed_area = 0.6;
    YamadaParams laser{};
};

inline NetworkSpec recurrent_pair(double weight, const RecurrentOptions& opt = {}) {
    NetworkSpec s;
    s.nodes.resize(2);
    for (std::size_t i = 0; i < 2; ++i) {
        s.nodes[i].model = opt.laser;
        s.nodes[i].wavelength = 1550.0 + static_cast<double>(i);
    }
    s.nodes[0].external = InputSignal::impulses({{opt.seed_time, opt.seed_area}});
    s.weights = Eigen::MatrixXd::Zero(2, 2);
    s.weights(0, 1) = s.weights(1, 0) = weight;
    s.drive_gain = opt.drive_gain;
    s.propagation_delay = opt.propagation_delay;
    return s;
}

/// Feed-forward chain of excitable lasers with weight w between stages; the
/// first node receives a single seed impulse.
inline NetworkSpec laser_chain(std::size_t length, double weight, const RecurrentOptions& opt = {}) {
    detail::require(length >= 1, "chain needs at least one node");
    NetworkSpec s;
    s.nodes.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
        s.nodes[i].model = opt.laser;
        s.nodes[i].wavelength = 1550.0 + static_cast<double>(i);
    }
    s.nodes[0].external = InputSignal::impulses({{opt.seed_time, opt.seed_area}});
    const auto n = static_cast<Eigen::Index>(length);
    s.weights = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) s.weights(i, i - 1) = weight;
    s.drive_gain = opt.drive_gain;
    s.propagation_delay = opt.propagation_delay;
    return s;
}

}  // namespace photonn
