#pragma once

#include <cmath>
#include <limits>

#include "photonn/error.hpp"

namespace photonn {

/// First-order microring add-drop filter with a Lorentzian drop response.
/// All wavelengths in nm.
struct MrrFilter {
    double lambda0 = 1550.0;  ///< rest resonance
    double fwhm = 0.1;        ///< resonance linewidth
    double fsr = 30.0;        ///< free spectral range

    double finesse() const { return fsr / fwhm; }

    void validate() const {
        detail::require(fwhm > 0.0, "filter linewidth must be positive");
        detail::require(fsr > fwhm, "filter FSR must exceed its linewidth");
        detail::require(std::isfinite(lambda0), "filter resonance must be finite");
    }
};

struct Transmission {
    double drop = 0.0;
    double through = 0.0;
};

/// Lossless two-port response at `lambda`, optionally with the resonance
/// shifted by `shift` nm. Intended for wavelengths within one FSR of lambda0.
inline Transmission mrr_transmission(const MrrFilter& f, double lambda, double shift = 0.0) {
    const double x = 2.0 * (lambda - (f.lambda0 + shift)) / f.fwhm;
    const double drop = 1.0 / (1.0 + x * x);
    return {drop, 1.0 - drop};
}

/// Balanced-detection weight drop - through, in [-1, 1].
inline double effective_weight(const MrrFilter& f, double lambda, double shift = 0.0) {
    const auto t = mrr_transmission(f, lambda, shift);
    return t.drop - t.through;
}

/// Detuning magnitude |lambda - resonance| that yields weight w.
inline double detuning_for_weight(double w, double fwhm) {
    detail::require(w >= -1.0 && w <= 1.0, "weight must lie in [-1, 1]");
    if (w == -1.0) return std::numeric_limits<double>::infinity();
    return 0.5 * fwhm * std::sqrt((1.0 - w) / (1.0 + w));
}

}  // namespace photonn
