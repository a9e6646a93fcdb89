#pragma once

#include <algorithm>
#include <cmath>

#include "photonn/error.hpp"

namespace photonn {

/// Uniform mid-tread quantizer; bits == 0 means ideal (pass-through).
struct Quantizer {
    int bits = 12;
    double lo = 0.0;
    double hi = 1.0;
    /// Levels span [lo, hi] inclusive when true, otherwise 2^bits steps of
    /// width (hi - lo) / 2^bits anchored at zero.
    bool endpoints = true;

    double step() const {
        const double levels = std::ldexp(1.0, bits);
        return endpoints ? (hi - lo) / (levels - 1.0) : (hi - lo) / levels;
    }

    double operator()(double x) const {
        if (bits == 0) return x;
        const double s = step();
        const double q = endpoints ? lo + s * std::round((x - lo) / s) : s * std::round(x / s);
        return std::clamp(q, lo, hi);
    }
};

/// DAC driving heater current over [0, full_scale].
inline Quantizer dac_quantizer(int bits, double full_scale) {
    detail::require(bits >= 0 && bits <= 52, "DAC bits must be in [0, 52]");
    detail::require(full_scale > 0.0, "DAC full scale must be positive");
    return {bits, 0.0, full_scale, true};
}

/// ADC reading a balanced-detector weight over [-1, 1].
inline Quantizer adc_quantizer(int bits) {
    detail::require(bits >= 0 && bits <= 52, "ADC bits must be in [0, 52]");
    return {bits, -1.0, 1.0, false};
}

}  // namespace photonn
