#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/weightbank/mrr.hpp"
#include "photonn/weightbank/quantizer.hpp"

namespace photonn {

/// Electro-thermal tuning: heater j dissipates R*I_j^2, ring i warms by
/// K_ij per watt, and the resonance red-shifts by thermo_optic nm per kelvin.
struct HeaterModel {
    double resistance = 1000.0;   ///< ohm
    double thermo_optic = 0.08;   ///< nm/K
    Eigen::MatrixXd crosstalk;    ///< K/W

    void validate() const {
        detail::require(resistance > 0.0, "heater resistance must be positive");
        detail::require(thermo_optic > 0.0, "thermo-optic coefficient must be positive");
        const auto n = crosstalk.rows();
        detail::require(n > 0 && crosstalk.cols() == n, "cross-talk matrix must be square and non-empty");
        for (Eigen::Index i = 0; i < n; ++i) {
            detail::require(crosstalk(i, i) > 0.0, "cross-talk diagonal must be positive");
            for (Eigen::Index j = 0; j < n; ++j) {
                detail::require(crosstalk(i, j) >= 0.0, "cross-talk entries must be non-negative");
                if (i != j)
                    detail::require(crosstalk(i, i) > crosstalk(i, j),
                                    "cross-talk matrix must be diagonally dominant");
            }
        }
    }
};

/// K_ij = k0 * exp(-|i - j| * pitch / decay_length).
inline Eigen::MatrixXd exponential_crosstalk(std::size_t n, double k0, double pitch, double decay_length) {
    detail::require(n > 0, "cross-talk needs at least one heater");
    detail::require(k0 > 0.0 && pitch > 0.0 && decay_length > 0.0,
                    "cross-talk parameters must be positive");
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            K(i, j) = k0 * std::exp(-static_cast<double>(std::abs(i - j)) * pitch / decay_length);
    return K;
}

/// Ring filters, heaters and converters for one weight bank. Channel i is
/// weighted by filter i; its weight is read at carrier channels[i].
struct WeightBank {
    std::vector<MrrFilter> filters;
    HeaterModel heater;
    std::vector<double> channels;  ///< carrier wavelengths, nm
    int adc_bits = 12;
    int dac_bits = 12;
    double dac_full_scale = 0.0;    ///< maximum heater current, A
    double detector_gain = 1.0;     ///< balanced-detector transimpedance (readout scale)

    std::size_t size() const { return filters.size(); }

    void validate() const {
        detail::require(!filters.empty(), "weight bank needs at least one channel");
        detail::require(channels.size() == filters.size(), "one carrier per filter required");
        heater.validate();
        detail::require(static_cast<std::size_t>(heater.crosstalk.rows()) == filters.size(),
                        "cross-talk matrix size must match the channel count");
        for (const auto& f : filters) f.validate();
        for (std::size_t i = 1; i < channels.size(); ++i)
            detail::require(channels[i] > channels[i - 1], "carriers must be strictly increasing");
        detail::require(channels.back() - channels.front() < filters.front().fsr,
                        "carriers must fit within one FSR");
        detail::require(dac_full_scale > 0.0, "DAC full scale must be positive");
        detail::require(detector_gain > 0.0, "detector gain must be positive");
        detail::require(adc_bits >= 0 && dac_bits >= 0, "converter resolution must be non-negative");
    }

    Quantizer dac() const { return dac_quantizer(dac_bits, dac_full_scale); }
    Quantizer adc() const { return adc_quantizer(adc_bits); }
};

/// Resonance shifts produced by heater currents: thermo_optic * K * (R I^2).
inline Eigen::VectorXd heaters_to_detunings(const Eigen::VectorXd& currents, const WeightBank& bank) {
    const auto n = static_cast<Eigen::Index>(bank.size());
    detail::require(currents.size() == n, "one current per heater required");
    for (Eigen::Index j = 0; j < n; ++j)
        detail::require(currents(j) >= 0.0 && currents(j) <= bank.dac_full_scale,
                        "heater current outside DAC range");
    const Eigen::VectorXd power = bank.heater.resistance * currents.array().square().matrix();
    return bank.heater.thermo_optic * (bank.heater.crosstalk * power);
}

/// Heater currents that produce the target resonance shifts (before DAC
/// quantization). Throws InfeasibleError when a heater would need negative power.
inline Eigen::VectorXd detunings_to_heaters(const Eigen::VectorXd& shifts, const WeightBank& bank) {
    const auto n = static_cast<Eigen::Index>(bank.size());
    detail::require(shifts.size() == n, "one shift per ring required");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bank.heater.crosstalk);
    if (!lu.isInvertible()) throw InvalidArgument("cross-talk matrix is singular");
    const Eigen::VectorXd power = lu.solve(shifts / bank.heater.thermo_optic);
    const double scale = power.cwiseAbs().maxCoeff();
    Eigen::VectorXd currents(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double p = power(j);
        if (p < 0.0) {
            if (p < -1e-12 * scale)
                throw InfeasibleError("heater " + std::to_string(j) + " would need negative power");
            p = 0.0;
        }
        currents(j) = std::sqrt(p / bank.heater.resistance);
    }
    return currents;
}

/// Noiseless weights of every channel for the given heater currents.
inline Eigen::VectorXd bank_weights(const WeightBank& bank, const Eigen::VectorXd& currents) {
    const Eigen::VectorXd shift = heaters_to_detunings(currents, bank);
    Eigen::VectorXd w(shift.size());
    for (Eigen::Index i = 0; i < shift.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        w(i) = effective_weight(bank.filters[k], bank.channels[k], shift(i));
    }
    return w;
}

/// Parameters for generating a uniform bank.
struct BankDesign {
    std::size_t channels = 4;
    double first_carrier = 1550.0;  ///< nm
    double channel_spacing = 1.0;   ///< nm
    double fwhm = 0.1;              ///< nm
    double fsr = 30.0;              ///< nm
    double rest_detuning = 5.0;     ///< rest resonance sits this many linewidths below its carrier
    double resistance = 1000.0;     ///< ohm
    double thermo_optic = 0.08;     ///< nm/K
    double k0 = 500.0;              ///< self-heating, K/W
    double heater_pitch = 20.0;     ///< um
    double decay_length = 8.0;      ///< um
    int adc_bits = 12;
    int dac_bits = 12;
    double detector_gain = 1.0;
};

namespace detail {

inline WeightBank make_bank_unchecked(const BankDesign& d) {
    detail::require(d.channels > 0, "bank needs at least one channel");
    detail::require(d.rest_detuning > 0.0, "rest detuning must be positive");
    WeightBank bank;
    for (std::size_t i = 0; i < d.channels; ++i) {
        const double carrier = d.first_carrier + static_cast<double>(i) * d.channel_spacing;
        bank.channels.push_back(carrier);
        bank.filters.push_back({carrier - d.rest_detuning * d.fwhm, d.fwhm, d.fsr});
    }
    bank.heater.resistance = d.resistance;
    bank.heater.thermo_optic = d.thermo_optic;
    bank.heater.crosstalk = exponential_crosstalk(d.channels, d.k0, d.heater_pitch, d.decay_length);
    bank.adc_bits = d.adc_bits;
    bank.dac_bits = d.dac_bits;
    bank.detector_gain = d.detector_gain;
    bank.dac_full_scale =
        std::sqrt(d.rest_detuning * d.fwhm / (d.thermo_optic * d.k0 * d.resistance));
    return bank;
}

}  // namespace detail

/// Builds a bank whose DAC full scale tunes each ring exactly onto its
/// carrier in the absence of cross-talk.
inline WeightBank make_bank(const BankDesign& d) {
    WeightBank bank = detail::make_bank_unchecked(d);
    bank.validate();
    return bank;
}

/// Bank with the design's ring, heater and converter parameters but tuned for
/// the given carriers (one ring per carrier, same ordering).
inline WeightBank make_bank(const BankDesign& d, const std::vector<double>& carriers) {
    detail::require(!carriers.empty(), "bank needs at least one carrier");
    BankDesign copy = d;
    copy.channels = carriers.size();
    copy.first_carrier = carriers.front();
    WeightBank bank = detail::make_bank_unchecked(copy);
    for (std::size_t i = 0; i < carriers.size(); ++i) {
        bank.channels[i] = carriers[i];
        bank.filters[i].lambda0 = carriers[i] - d.rest_detuning * d.fwhm;
    }
    bank.validate();
    return bank;
}

}  // namespace photonn
