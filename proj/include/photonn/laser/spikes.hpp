#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "photonn/error.hpp"

namespace photonn {

struct SpikeEvent {
    double time = 0.0;    ///< time of the intensity peak
    double peak = 0.0;    ///< peak intensity
    double energy = 0.0;  ///< intensity integrated over the excursion
};

/// Spike events in strictly increasing time order.
struct SpikeTrain {
    std::vector<SpikeEvent> events;

    std::size_t size() const noexcept { return events.size(); }
    bool empty() const noexcept { return events.empty(); }

    std::vector<double> times() const {
        std::vector<double> t;
        t.reserve(events.size());
        for (const auto& e : events) t.push_back(e.time);
        return t;
    }
};

/// Extracts one event per contiguous excursion above `threshold`.
///
/// Samples are taken at t0 + k*dt. Each event is stamped at the excursion's
/// maximum; its energy is the rectangle-rule integral of the samples inside the
/// excursion. An excursion that starts less than `dead_time` after the previous
/// event's peak is merged into that event.
inline SpikeTrain detect_spikes(std::span<const double> trace, double dt, double threshold,
                                double dead_time = 0.0, double t0 = 0.0) {
    if (trace.empty()) throw InvalidArgument("detect_spikes: empty trace");
    detail::require(threshold > 0.0, "detect_spikes: threshold must be positive");
    detail::require(dead_time >= 0.0, "detect_spikes: dead_time must be non-negative");
    detail::require(dt > 0.0, "detect_spikes: dt must be positive");

    SpikeTrain train;
    const std::size_t n = trace.size();
    std::size_t i = 0;
    while (i < n) {
        if (!(trace[i] > threshold)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t arg = i;
        double energy = 0.0;
        while (i < n && trace[i] > threshold) {
            if (trace[i] > trace[arg]) arg = i;
            energy += trace[i] * dt;
            ++i;
        }
        const double start_time = t0 + static_cast<double>(start) * dt;
        SpikeEvent ev{t0 + static_cast<double>(arg) * dt, trace[arg], energy};
        if (!train.events.empty() && start_time - train.events.back().time < dead_time) {
            auto& prev = train.events.back();
            prev.energy += ev.energy;
            if (ev.peak > prev.peak) {
                prev.peak = ev.peak;
                prev.time = ev.time;
            }
        } else {
            train.events.push_back(ev);
        }
    }
    return train;
}

struct PulseStatistics {
    double mean_energy = 0.0;
    double relative_spread = 0.0;  ///< population stddev / mean
};

/// Energy repeatability of a set of pulses.
inline PulseStatistics pulse_shape_statistics(const SpikeTrain& train) {
    if (train.size() < 2) throw InvalidArgument("pulse_shape_statistics needs at least 2 spikes");
    double mean = 0.0;
    for (const auto& e : train.events) mean += e.energy;
    mean /= static_cast<double>(train.size());
    double var = 0.0;
    for (const auto& e : train.events) var += (e.energy - mean) * (e.energy - mean);
    var /= static_cast<double>(train.size());
    return {mean, std::sqrt(var) / mean};
}

}  // namespace photonn
