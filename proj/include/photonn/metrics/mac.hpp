#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "photonn/error.hpp"

namespace photonn {

/// A neuromorphic processor summarised by the quantities needed for MAC metrics.
struct ProcessorSpec {
    std::string name;
    double mac_rate = 0.0;      ///< per-synapse MAC/s
    double wallplug = 0.0;      ///< W
    double neurons = 0.0;
    double fan_in = 0.0;
    double area_per_mac = 0.0;  ///< um^2
    double precision_bits = 0.0;

    void validate() const {
        detail::require(mac_rate > 0.0 && wallplug > 0.0 && neurons > 0.0 && fan_in > 0.0 &&
                            area_per_mac > 0.0 && precision_bits > 0.0,
                        "processor figures must all be positive");
    }
};

/// Wall-plug power divided by neuron count, fan-in and per-synapse MAC rate (J/MAC).
inline double energy_per_mac(double wallplug, double neurons, double fan_in, double mac_rate) {
    detail::require(wallplug > 0.0 && neurons > 0.0 && fan_in > 0.0 && mac_rate > 0.0,
                    "energy per MAC needs positive power, neurons, fan-in and rate");
    return wallplug / (neurons * fan_in * mac_rate);
}

inline double energy_per_mac(const ProcessorSpec& p) {
    p.validate();
    return energy_per_mac(p.wallplug, p.neurons, p.fan_in, p.mac_rate);
}

struct Throughput {
    double macs_per_second = 0.0;
    bool saturated = false;  ///< true when the product exceeded the double range
};

/// N neurons with fan-in M perform N*M MACs per time step.
inline Throughput total_mac_throughput(double neurons, double fan_in, double rate) {
    detail::require(neurons > 0.0 && fan_in > 0.0 && rate > 0.0, "throughput needs positive inputs");
    const double v = neurons * fan_in * rate;
    if (!std::isfinite(v)) return {std::numeric_limits<double>::max(), true};
    return {v, false};
}

}  // namespace photonn
