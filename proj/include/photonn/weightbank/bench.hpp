#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/weightbank/bank.hpp"

namespace photonn {

/// One optical spectrum acquisition: the resonance position of every ring
/// and the voltage across every heater.
struct SpectrumReading {
    Eigen::VectorXd resonances;  ///< nm
    Eigen::VectorXd voltages;    ///< V
};

/// Stand-in for the lab: the hidden ground-truth bank plus converters and
/// optional noise. Every call counts as one measurement.
class SimulatedBench {
public:
    explicit SimulatedBench(WeightBank truth, std::uint64_t seed = 0)
        : truth_(std::move(truth)), rng_(seed) {
        truth_.validate();
    }

    const WeightBank& truth() const { return truth_; }
    std::size_t size() const { return truth_.size(); }
    std::size_t measurements() const { return count_; }
    void reset_count() { count_ = 0; }

    /// Standard deviation of additive Gaussian noise on applied heater current (A).
    void set_drive_noise(double sigma) {
        detail::require(sigma >= 0.0, "noise level must be non-negative");
        drive_noise_ = sigma;
    }

    /// DAC-quantizes and applies the currents (with drive noise), returning
    /// what actually flows through the heaters.
    Eigen::VectorXd drive(const Eigen::VectorXd& requested) {
        const Quantizer dac = truth_.dac();
        Eigen::VectorXd actual(requested.size());
        std::normal_distribution<double> noise(0.0, 1.0);
        for (Eigen::Index j = 0; j < requested.size(); ++j) {
            double v = dac(requested(j));
            if (drive_noise_ > 0.0) v += drive_noise_ * noise(rng_);
            actual(j) = std::clamp(v, 0.0, truth_.dac_full_scale);
        }
        return actual;
    }

    /// Balanced-detector difference output of one channel, ADC-quantized.
    double read_weight(std::size_t channel, const Eigen::VectorXd& currents) {
        check_channel(channel);
        ++count_;
        const Eigen::VectorXd w = bank_weights(truth_, drive(currents));
        return truth_.adc()(truth_.detector_gain * w(static_cast<Eigen::Index>(channel)));
    }

    /// Balanced-detector sum output (both photodiodes added), ADC-quantized.
    double read_sum(std::size_t channel, const Eigen::VectorXd& currents) {
        check_channel(channel);
        ++count_;
        const Eigen::VectorXd shift = heaters_to_detunings(drive(currents), truth_);
        const auto k = channel;
        const auto t = mrr_transmission(truth_.filters[k], truth_.channels[k],
                                        shift(static_cast<Eigen::Index>(k)));
        return truth_.adc()(0.5 * truth_.detector_gain * (t.drop + t.through));
    }

    SpectrumReading read_spectrum(const Eigen::VectorXd& currents) {
        ++count_;
        const Eigen::VectorXd applied = drive(currents);
        const Eigen::VectorXd shift = heaters_to_detunings(applied, truth_);
        SpectrumReading r;
        r.resonances.resize(shift.size());
        for (Eigen::Index i = 0; i < shift.size(); ++i)
            r.resonances(i) = truth_.filters[static_cast<std::size_t>(i)].lambda0 + shift(i);
        r.voltages = truth_.heater.resistance * applied;
        return r;
    }

private:
    void check_channel(std::size_t channel) const {
        detail::require(channel < truth_.size(), "channel index out of range");
    }

    WeightBank truth_;
    std::mt19937_64 rng_;
    double drive_noise_ = 0.0;
    std::size_t count_ = 0;
};

}  // namespace photonn
