#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonn/error.hpp"
#include "photonn/weightbank/accuracy.hpp"
#include "photonn/weightbank/bank.hpp"
#include "photonn/weightbank/bench.hpp"
#include "photonn/weightbank/interpolant.hpp"

namespace photonn {

/// Measured weight versus heater power (I^2) for one channel, all other
/// heaters off. Readings are taken as normalised weights (unit detector gain).
struct ChannelInterpolant {
    std::size_t channel = 0;
    MonotoneCubic curve;

    /// Heater current whose calibrated weight is w (before DAC quantization).
    double current_for(double w) const { return std::sqrt(std::max(curve.inverse(w), 0.0)); }
};

/// Heater and filter parameters identified from spectra and detector readings.
struct ThermalFit {
    double thermo_optic = 0.0;        ///< assumed known, nm/K
    Eigen::MatrixXd shift_per_watt;   ///< thermo_optic * K, nm/W
    Eigen::MatrixXd crosstalk;        ///< K estimate, K/W
    Eigen::VectorXd resistance;       ///< per heater, ohm
    Eigen::VectorXd rest_resonance;   ///< nm
    Eigen::VectorXd fwhm;             ///< nm
    Eigen::VectorXd rest_detuning;    ///< carrier minus rest resonance, nm
    Eigen::VectorXd detector_gain;
    Eigen::VectorXd residual;         ///< RMS residual of the filter line fit, per channel
};

struct CalibrationModel {
    std::vector<ChannelInterpolant> interpolants;  ///< indexed by channel when present
    std::optional<ThermalFit> thermal;
    std::size_t measurements = 0;
};

struct AccuracyReport {
    std::size_t channel = 0;
    std::size_t points = 0;  ///< distinct calibration points after DAC quantization
    double max_error = 0.0;
    double bits = 0.0;
    double dB = 0.0;
};

struct InterpolationCalibration {
    ChannelInterpolant interpolant;
    AccuracyReport report;
};

namespace detail {

inline Eigen::VectorXd single_drive(std::size_t n, std::size_t j, double current) {
    Eigen::VectorXd I = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    I(static_cast<Eigen::Index>(j)) = current;
    return I;
}

}  // namespace detail

/// Worst-case error of a single-channel interpolant over a dense sweep of
/// targets spanning its calibrated range, using noiseless physics.
inline AccuracyReport verify_interpolant(const WeightBank& bank, const ChannelInterpolant& ci,
                                         std::size_t targets = 4001) {
    detail::require(targets >= 2, "verification needs at least 2 targets");
    const Quantizer dac = bank.dac();
    const double lo = ci.curve.y_min();
    const double hi = ci.curve.y_max();
    const auto ch = static_cast<Eigen::Index>(ci.channel);
    double worst = 0.0;
    for (std::size_t k = 0; k < targets; ++k) {
        const double w = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(targets - 1);
        const double I = dac(ci.current_for(w));
        const double achieved = bank_weights(bank, detail::single_drive(bank.size(), ci.channel, I))(ch);
        worst = std::max(worst, std::abs(achieved - w));
    }
    AccuracyReport r;
    r.channel = ci.channel;
    r.points = ci.curve.knots_x().size();
    r.max_error = worst;
    const auto acc = weight_accuracy(1.0, std::max(worst, 1e-300));
    r.bits = acc.bits;
    r.dB = acc.dB;
    return r;
}

/// Sweeps one heater uniformly in power, reads the weight through the ADC and
/// fits a monotone interpolant of weight versus power.
inline InterpolationCalibration calibrate_interpolation(SimulatedBench& bench, std::size_t channel,
                                                        std::size_t n_points) {
    detail::require(n_points >= 4, "interpolation calibration needs at least 4 points");
    detail::require(channel < bench.size(), "channel index out of range");
    const WeightBank& bank = bench.truth();
    const Quantizer dac = bank.dac();

    std::vector<double> power;
    std::vector<double> weight;
    for (std::size_t k = 0; k < n_points; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(n_points - 1);
        const double I = dac(bank.dac_full_scale * std::sqrt(frac));
        if (!power.empty() && I * I <= power.back()) continue;  // collapsed by the DAC
        power.push_back(I * I);
        weight.push_back(bench.read_weight(channel, detail::single_drive(bank.size(), channel, I)));
    }
    for (std::size_t k = 1; k < weight.size(); ++k)
        if (weight[k] < weight[k - 1])
            throw CalibrationError("measured weight is not monotone in heater power on channel " +
                                   std::to_string(channel) + " (resonance crossed the carrier)");

    InterpolationCalibration out{{channel, MonotoneCubic(std::move(power), std::move(weight))}, {}};
    out.report = verify_interpolant(bank, out.interpolant);
    return out;
}

/// Interpolation calibration of every channel in turn.
inline CalibrationModel calibrate_interpolation_all(SimulatedBench& bench, std::size_t n_points,
                                                    std::vector<AccuracyReport>* reports = nullptr) {
    CalibrationModel model;
    const std::size_t start = bench.measurements();
    for (std::size_t ch = 0; ch < bench.size(); ++ch) {
        auto c = calibrate_interpolation(bench, ch, n_points);
        model.interpolants.push_back(std::move(c.interpolant));
        if (reports) reports->push_back(c.report);
    }
    model.measurements = bench.measurements() - start;
    return model;
}

/// Measurements per channel in each stage of the model-based procedure.
struct StagePoints {
    std::size_t heater = 10;
    std::size_t filter = 20;
    std::size_t amplifier = 4;

    std::size_t per_channel() const { return heater + filter + amplifier; }
};

/// Identifies the cross-talk matrix, heater resistances and filter line
/// parameters with O(N) measurements.
///
/// Heater stage: drive each heater alone and record ring positions and heater
/// voltage. Amplifier stage: balanced-detector sum readings fix the readout
/// normalisation. Filter stage: own-heater sweep fitted for linewidth and rest
/// detuning in the coordinate where the Lorentzian is linear.
inline CalibrationModel calibrate_model_based(SimulatedBench& bench, double thermo_optic,
                                              StagePoints pts = {}) {
    detail::require(thermo_optic > 0.0, "thermo-optic coefficient must be positive");
    if (pts.heater < 2) throw CalibrationError("heater stage needs at least 2 points per heater");
    if (pts.amplifier < 1) throw CalibrationError("amplifier stage needs at least 1 point");
    if (pts.filter < 2) throw CalibrationError("filter stage needs at least 2 points");

    const WeightBank& bank = bench.truth();
    const std::size_t n = bank.size();
    const auto m = static_cast<Eigen::Index>(n);
    const Quantizer dac = bank.dac();
    const double fs = bank.dac_full_scale;
    const std::size_t start = bench.measurements();

    ThermalFit fit;
    fit.thermo_optic = thermo_optic;
    fit.shift_per_watt.resize(m, m);
    fit.resistance.resize(m);
    fit.rest_resonance = Eigen::VectorXd::Zero(m);

    // Heater stage.
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto P = static_cast<Eigen::Index>(pts.heater);
        Eigen::VectorXd I2(P);
        Eigen::MatrixXd pos(P, m);
        double vi = 0.0;
        double ii = 0.0;
        for (Eigen::Index k = 0; k < P; ++k) {
            const double I = dac(fs * std::sqrt(static_cast<double>(k + 1) / static_cast<double>(P)));
            const auto r = bench.read_spectrum(detail::single_drive(n, j, I));
            I2(k) = I * I;
            pos.row(k) = r.resonances.transpose();
            vi += r.voltages(jj) * I;
            ii += I * I;
        }
        if (!(ii > 0.0)) throw CalibrationError("heater stage produced no drive on heater " + std::to_string(j));
        fit.resistance(jj) = vi / ii;
        Eigen::MatrixXd X(P, 2);
        X.col(0).setOnes();
        X.col(1) = I2;
        const auto qr = X.colPivHouseholderQr();
        if (qr.rank() < 2) throw CalibrationError("heater stage readings are rank deficient");
        const Eigen::MatrixXd coef = qr.solve(pos);  // 2 x m
        for (Eigen::Index i = 0; i < m; ++i) {
            fit.shift_per_watt(i, jj) = coef(1, i) / fit.resistance(jj);
            fit.rest_resonance(i) += coef(0, i) / static_cast<double>(n);
        }
    }
    fit.crosstalk = fit.shift_per_watt / thermo_optic;

    // Amplifier stage.
    fit.detector_gain.resize(m);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < pts.amplifier; ++k) {
            const double I = dac(fs * std::sqrt(static_cast<double>(k) / static_cast<double>(pts.amplifier)));
            sum += bench.read_sum(i, detail::single_drive(n, i, I));
        }
        fit.detector_gain(static_cast<Eigen::Index>(i)) = 2.0 * sum / static_cast<double>(pts.amplifier);
    }

    // Filter stage.
    fit.fwhm.resize(m);
    fit.rest_detuning.resize(m);
    fit.residual.resize(m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        std::vector<double> s;
        std::vector<double> y;
        for (std::size_t k = 0; k < pts.filter; ++k) {
            const double frac = static_cast<double>(k) / static_cast<double>(pts.filter - 1);
            const double I = dac(fs * std::sqrt(frac));
            const double w = bench.read_weight(i, detail::single_drive(n, i, I)) / fit.detector_gain(ii);
            if (std::abs(w) > 0.95) continue;
            s.push_back(fit.shift_per_watt(ii, ii) * fit.resistance(ii) * I * I);
            y.push_back(std::sqrt((1.0 - w) / (1.0 + w)));
        }
        if (s.size() < 2)
            throw CalibrationError("filter stage has too few usable readings on channel " + std::to_string(i));
        const auto P = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd X(P, 2);
        Eigen::VectorXd Y(P);
        for (Eigen::Index k = 0; k < P; ++k) {
            X(k, 0) = 1.0;
            X(k, 1) = -s[static_cast<std::size_t>(k)];
            Y(k) = y[static_cast<std::size_t>(k)];
        }
        const auto qr = X.colPivHouseholderQr();
        if (qr.rank() < 2) throw CalibrationError("filter stage readings are rank deficient");
        const Eigen::Vector2d ab = qr.solve(Y);
        if (!(ab(1) > 0.0)) throw CalibrationError("filter stage fit has the wrong slope sign");
        fit.fwhm(ii) = 2.0 / ab(1);
        fit.rest_detuning(ii) = ab(0) / ab(1);
        fit.residual(ii) = std::sqrt((X * ab - Y).squaredNorm() / static_cast<double>(P));
    }

    if (!fit.shift_per_watt.fullPivLu().isInvertible())
        throw CalibrationError("identified cross-talk matrix is singular");

    CalibrationModel model;
    model.thermal = std::move(fit);
    model.measurements = bench.measurements() - start;
    return model;
}

/// Model-based calibration taking the thermo-optic coefficient from the bank's
/// datasheet value.
inline CalibrationModel calibrate_model_based(SimulatedBench& bench, StagePoints pts = {}) {
    return calibrate_model_based(bench, bench.truth().heater.thermo_optic, pts);
}

struct WeightApplication {
    Eigen::VectorXd currents;   ///< DAC-quantized heater currents, A
    Eigen::VectorXd predicted;  ///< weights the calibration model expects
    Eigen::VectorXd achieved;   ///< weights produced by the true physics
};

struct ApplyOptions {
    double infeasible_tolerance = 0.05;  ///< largest tolerated model-predicted weight error
};

namespace detail {

/// Non-negative heater powers for target shifts: solve, pin negative powers
/// to zero, and re-solve the remaining heaters until all are non-negative.
inline Eigen::VectorXd nonnegative_powers(const Eigen::MatrixXd& M, const Eigen::VectorXd& shifts) {
    const Eigen::Index n = shifts.size();
    std::vector<bool> free(static_cast<std::size_t>(n), true);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (Eigen::Index round = 0; round <= n; ++round) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < n; ++i)
            if (free[static_cast<std::size_t>(i)]) idx.push_back(i);
        p.setZero();
        if (idx.empty()) break;
        const auto f = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd Mf(f, f);
        Eigen::VectorXd sf(f);
        for (Eigen::Index a = 0; a < f; ++a) {
            sf(a) = shifts(idx[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < f; ++b)
                Mf(a, b) = M(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
        const Eigen::VectorXd pf = Mf.fullPivLu().solve(sf);
        bool clean = true;
        for (Eigen::Index a = 0; a < f; ++a) {
            if (pf(a) < 0.0) {
                free[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] = false;
                clean = false;
            } else {
                p(idx[static_cast<std::size_t>(a)]) = pf(a);
            }
        }
        if (clean) break;
    }
    return p;
}

inline double lorentz_weight(double detuning, double fwhm) {
    const double x = 2.0 * detuning / fwhm;
    return 2.0 / (1.0 + x * x) - 1.0;
}

}  // namespace detail

/// Heater currents for target weights w, computed from the calibration, and
/// the weights they actually produce on the bank.
inline WeightApplication apply_weights(const WeightBank& bank, const CalibrationModel& calib,
                                       const Eigen::VectorXd& w, const ApplyOptions& opt = {}) {
    const std::size_t n = bank.size();
    const auto m = static_cast<Eigen::Index>(n);
    detail::require(w.size() == m, "one target weight per channel required");
    for (Eigen::Index i = 0; i < m; ++i)
        detail::require(w(i) >= -1.0 && w(i) <= 1.0, "target weights must lie in [-1, 1]");

    WeightApplication out;
    out.currents.resize(m);
    out.predicted.resize(m);
    if (calib.thermal) {
        const ThermalFit& f = *calib.thermal;
        detail::require(f.fwhm.size() == m, "calibration does not match the bank size");
        Eigen::VectorXd target_shift(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double det = std::min(detuning_for_weight(w(i), f.fwhm(i)), f.rest_detuning(i));
            target_shift(i) = f.rest_detuning(i) - det;
        }
        const Eigen::VectorXd p = detail::nonnegative_powers(f.shift_per_watt, target_shift);
        const Eigen::VectorXd shift = f.shift_per_watt * p;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            out.predicted(i) = detail::lorentz_weight(f.rest_detuning(i) - shift(i), f.fwhm(i));
            worst = std::max(worst, std::abs(out.predicted(i) - w(i)));
        }
        if (worst > opt.infeasible_tolerance)
            throw InfeasibleError("weight vector is not reachable under thermal cross-talk (model error " +
                                  std::to_string(worst) + ")");
        for (Eigen::Index i = 0; i < m; ++i)
            out.currents(i) = std::min(std::sqrt(p(i) / f.resistance(i)), bank.dac_full_scale);
    } else {
        detail::require(calib.interpolants.size() == n, "calibration has no model for every channel");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ci = calib.interpolants[i];
            const auto ii = static_cast<Eigen::Index>(i);
            out.currents(ii) = std::min(ci.current_for(w(ii)), bank.dac_full_scale);
            out.predicted(ii) = std::clamp(w(ii), ci.curve.y_min(), ci.curve.y_max());
        }
    }
    const Quantizer dac = bank.dac();
    for (Eigen::Index i = 0; i < m; ++i) out.currents(i) = dac(out.currents(i));
    out.achieved = bank_weights(bank, out.currents);
    return out;
}

/// Half the peak-to-peak spread of achieved weights over repeated
/// applications of the same command with drive noise on the bench (worst channel).
inline double weight_precision(SimulatedBench& bench, const CalibrationModel& calib,
                               const Eigen::VectorXd& w, std::size_t trials, double drive_noise) {
    detail::require(trials >= 2, "precision needs at least 2 trials");
    const auto cmd = apply_weights(bench.truth(), calib, w);
    bench.set_drive_noise(drive_noise);
    const auto m = w.size();
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(m, 2.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(m, -2.0);
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::VectorXd got = bank_weights(bench.truth(), bench.drive(cmd.currents));
        lo = lo.cwiseMin(got);
        hi = hi.cwiseMax(got);
    }
    bench.set_drive_noise(0.0);
    return 0.5 * (hi - lo).maxCoeff();
}

/// The single-ring bank formed by one channel of `bank`.
inline WeightBank single_channel_bank(const WeightBank& bank, std::size_t channel) {
    detail::require(channel < bank.size(), "channel index out of range");
    WeightBank b = bank;
    b.filters = {bank.filters[channel]};
    b.channels = {bank.channels[channel]};
    const auto c = static_cast<Eigen::Index>(channel);
    b.heater.crosstalk = Eigen::MatrixXd::Constant(1, 1, bank.heater.crosstalk(c, c));
    return b;
}

}  // namespace photonn
