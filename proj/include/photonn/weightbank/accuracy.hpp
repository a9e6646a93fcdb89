#pragma once

#include <cmath>

#include "photonn/error.hpp"

namespace photonn {

struct WeightAccuracy {
    double dB = 0.0;
    double bits = 0.0;
};

/// Dynamic range of a weight controller: range over worst-case error,
/// expressed in decibels and in equivalent bits.
inline WeightAccuracy weight_accuracy(double range, double max_error) {
    if (!(max_error > 0.0)) throw InvalidArgument("max_error must be positive");
    detail::require(range > 0.0, "weight range must be positive");
    const double ratio = range / max_error;
    return {10.0 * std::log10(ratio), std::log2(ratio)};
}

/// Channels a bank of rings with the given finesse can carry at a minimum
/// spacing expressed in linewidths (rounded to nearest).
inline long max_channel_count(double finesse, double spacing_linewidths) {
    detail::require(finesse > 0.0, "finesse must be positive");
    detail::require(spacing_linewidths >= 1.0, "channel spacing must be at least one linewidth");
    const long n = std::lround(finesse / spacing_linewidths);
    return n < 0 ? 0 : n;
}

}  // namespace photonn
