#pragma once

#include <cstddef>
#include <span>

#include "photonn/error.hpp"

namespace photonn {

/// Balanced-detector output for WDM channel powers x and filter weights w:
/// sum_i w_i x_i (negative when inhibitory weights dominate).
inline double wdm_weighted_sum(std::span<const double> powers, std::span<const double> weights) {
    if (powers.size() != weights.size())
        throw InvalidArgument("weighted sum needs one weight per channel");
    double acc = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        detail::require(powers[i] >= 0.0, "optical powers must be non-negative");
        detail::require(weights[i] >= -1.0 && weights[i] <= 1.0, "weights must lie in [-1, 1]");
        acc += weights[i] * powers[i];
    }
    return acc;
}

}  // namespace photonn
