#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "photonn/error.hpp"

namespace photonn {

/// A delta input of the given area applied at `time`.
struct Impulse {
    double time = 0.0;
    double area = 0.0;
};

/// Time-dependent perturbation θ(t).
///
/// The continuous part is the sum of a constant bias, a linearly interpolated
/// sample series (zero outside its span) and an optional analytic waveform.
/// Impulses are applied by the integrators as instantaneous increments at the
/// first grid time not earlier than the impulse time.
class InputSignal {
public:
    InputSignal() = default;

    static InputSignal constant(double value) {
        InputSignal s;
        s.bias_ = value;
        return s;
    }

    static InputSignal sampled(double t0, double dt, std::vector<double> values) {
        detail::require(dt > 0.0, "sampled input needs dt > 0");
        for (double v : values) detail::require(std::isfinite(v), "sampled input must be finite");
        InputSignal s;
        s.sample_t0_ = t0;
        s.sample_dt_ = dt;
        s.samples_ = std::move(values);
        return s;
    }

    static InputSignal impulses(std::vector<Impulse> list) {
        InputSignal s;
        for (const auto& imp : list) s.add_impulse(imp.time, imp.area);
        return s;
    }

    static InputSignal waveform(std::function<double(double)> f) {
        InputSignal s;
        s.waveform_ = std::move(f);
        return s;
    }

    /// Appends an impulse; times must be non-decreasing.
    InputSignal& add_impulse(double time, double area) {
        detail::require(std::isfinite(time) && std::isfinite(area), "impulse must be finite");
        detail::require(impulses_.empty() || time >= impulses_.back().time,
                        "impulse times must be non-decreasing");
        impulses_.push_back({time, area});
        return *this;
    }

    InputSignal& set_bias(double value) {
        bias_ = value;
        return *this;
    }

    double continuous(double t) const {
        double v = bias_;
        if (!samples_.empty()) v += interpolate(t);
        if (waveform_) v += waveform_(t);
        return v;
    }

    std::span<const Impulse> impulse_list() const { return impulses_; }

    bool has_continuous() const { return bias_ != 0.0 || !samples_.empty() || waveform_; }

    /// θ scaled by a constant factor (impulse areas included).
    InputSignal scaled(double k) const {
        InputSignal s = *this;
        s.bias_ *= k;
        for (double& v : s.samples_) v *= k;
        for (auto& imp : s.impulses_) imp.area *= k;
        if (waveform_) {
            auto f = waveform_;
            s.waveform_ = [f, k](double t) { return k * f(t); };
        }
        return s;
    }

    /// Grid index at which each impulse fires for step dt.
    std::vector<std::size_t> impulse_steps(double dt) const {
        std::vector<std::size_t> steps;
        steps.reserve(impulses_.size());
        for (const auto& imp : impulses_) {
            const double k = std::ceil(imp.time / dt - 1e-9);
            steps.push_back(k <= 0.0 ? 0 : static_cast<std::size_t>(k));
        }
        return steps;
    }

private:
    double interpolate(double t) const {
        const double x = (t - sample_t0_) / sample_dt_;
        const double last = static_cast<double>(samples_.size() - 1);
        if (x < 0.0 || x > last) return 0.0;
        const auto i = static_cast<std::size_t>(std::floor(x));
        if (i + 1 >= samples_.size()) return samples_.back();
        const double frac = x - static_cast<double>(i);
        return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
    }

    double bias_ = 0.0;
    double sample_t0_ = 0.0;
    double sample_dt_ = 1.0;
    std::vector<double> samples_;
    std::function<double(double)> waveform_;
    std::vector<Impulse> impulses_;
};

/// Cursor that hands out the impulse areas due at each grid step.
class ImpulseSchedule {
public:
    ImpulseSchedule(const InputSignal& input, double dt)
        : impulses_(input.impulse_list()), steps_(input.impulse_steps(dt)) {}

    /// Total area of impulses due at or before grid step k (each consumed once).
    double take(std::size_t k) {
        double area = 0.0;
        while (next_ < steps_.size() && steps_[next_] <= k) area += impulses_[next_++].area;
        return area;
    }

private:
    std::span<const Impulse> impulses_;
    std::vector<std::size_t> steps_;
    std::size_t next_ = 0;
};

}  // namespace photonn
