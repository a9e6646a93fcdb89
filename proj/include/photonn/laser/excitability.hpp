#pragma once

#include <cstddef>

#include "photonn/error.hpp"
#include "photonn/laser/yamada.hpp"

namespace photonn {

/// Settings for single-impulse excitability probes started from rest.
struct ExcitabilityProbe {
    double dt = 0.02;
    double horizon = 150.0;
    double impulse_time = 5.0;
    SpikeDetection detection{};
};

/// Number of spikes produced by an impulse train applied from rest.
inline std::size_t spike_count(const YamadaParams& p, const InputSignal& input,
                               const ExcitabilityProbe& probe) {
    YamadaRunOptions opt;
    opt.detection = probe.detection;
    return simulate_yamada(p, input, probe.dt, probe.horizon, opt).spikes.size();
}

/// True when a single impulse of the given area elicits at least one spike.
inline bool fires(const YamadaParams& p, double area, const ExcitabilityProbe& probe = {}) {
    return spike_count(p, InputSignal::impulses({{probe.impulse_time, area}}), probe) > 0;
}

/// Smallest impulse area that makes the laser fire, located by bisection on
/// [lo, hi] to absolute tolerance `tol`. Throws if hi does not fire or lo does.
inline double firing_threshold(const YamadaParams& p, double lo, double hi, double tol = 1e-4,
                               const ExcitabilityProbe& probe = {}) {
    detail::require(lo >= 0.0 && hi > lo, "firing_threshold needs 0 <= lo < hi");
    detail::require(tol > 0.0, "firing_threshold needs tol > 0");
    if (fires(p, lo, probe)) throw InvalidArgument("lower bracket already fires");
    if (!fires(p, hi, probe)) throw InvalidArgument("upper bracket does not fire");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (fires(p, mid, probe) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace photonn
