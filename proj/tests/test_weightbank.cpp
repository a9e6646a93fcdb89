#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "photonn/weightbank/accuracy.hpp"
#include "photonn/weightbank/bank.hpp"
#include "photonn/weightbank/bench.hpp"
#include "photonn/weightbank/calibration.hpp"
#include "photonn/weightbank/interpolant.hpp"
#include "photonn/weightbank/mrr.hpp"
#include "photonn/weightbank/quantizer.hpp"

using namespace photonn;
using Catch::Approx;

namespace {

WeightBank toy_bank(const Eigen::MatrixXd& K, double alpha = 0.5) {
    WeightBank b;
    const auto n = static_cast<std::size_t>(K.rows());
    for (std::size_t i = 0; i < n; ++i) {
        b.channels.push_back(1550.0 + static_cast<double>(i));
        b.filters.push_back({1549.5 + static_cast<double>(i), 0.1, 30.0});
    }
    b.heater.resistance = 1.0;
    b.heater.thermo_optic = alpha;
    b.heater.crosstalk = K;
    b.dac_full_scale = 10.0;
    b.validate();
    return b;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

double calib_bits(std::size_t points, int bits) {
    BankDesign d;
    d.channels = 1;
    d.adc_bits = d.dac_bits = bits;
    SimulatedBench bench(make_bank(d));
    return calibrate_interpolation(bench, 0, points).report.bits;
}

}  // namespace

TEST_CASE("ring transmission", "[mrr]") {
    MrrFilter f{1550.0, 0.2, 20.0};
    auto t = mrr_transmission(f, 1550.0);
    CHECK(t.drop == 1.0);
    CHECK(t.through == 0.0);
    t = mrr_transmission(f, 1550.0 + 0.1);
    CHECK(t.drop == Approx(0.5));
    CHECK(t.through == Approx(0.5));
    CHECK(mrr_transmission(f, 1550.0 + 50 * 0.2).drop < 1e-3);

    CHECK(effective_weight(f, 1550.0) == 1.0);
    CHECK(effective_weight(f, 1550.1) == Approx(0.0).margin(1e-12));
    CHECK(effective_weight(f, 1560.0) == Approx(-1.0).margin(1e-3));
    CHECK(f.finesse() == Approx(100.0));
}

TEST_CASE("ring transmission invariants", "[mrr]") {
    MrrFilter f{1550.0, 0.1, 20.0};
    double prev_w = 2.0;
    for (int k = 0; k <= 2000; ++k) {
        const double det = 0.005 * k;
        const auto t = mrr_transmission(f, f.lambda0 + det);
        REQUIRE(t.drop + t.through == 1.0);
        const double w = effective_weight(f, f.lambda0 + det);
        REQUIRE(w >= -1.0);
        REQUIRE(w <= 1.0);
        REQUIRE(w <= prev_w);
        REQUIRE(effective_weight(f, f.lambda0 - det) == Approx(w).margin(1e-12));
        prev_w = w;
    }
    CHECK(detuning_for_weight(0.0, 0.1) == Approx(0.05));
    CHECK(std::isinf(detuning_for_weight(-1.0, 0.1)));
    CHECK_THROWS_AS(detuning_for_weight(1.2, 0.1), InvalidArgument);

    MrrFilter bad{1550.0, 0.5, 0.4};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("quantizers", "[quantizer]") {
    const auto dac = dac_quantizer(2, 3.0);
    CHECK(dac(0.4) == 0.0);
    CHECK(dac(0.6) == 1.0);
    CHECK(dac(2.9) == 3.0);
    CHECK(dac(5.0) == 3.0);
    const auto adc = adc_quantizer(3);
    CHECK(adc(0.0) == 0.0);
    CHECK(adc(0.3) == 0.25);
    CHECK(adc(-2.0) == -1.0);
    CHECK(adc(0.99) == 1.0);
    CHECK(adc_quantizer(0)(0.123) == 0.123);
}

TEST_CASE("heater tuning forward model", "[heater]") {
    const double alpha = 0.5;
    auto one = toy_bank(Eigen::MatrixXd::Identity(1, 1), alpha);
    CHECK(heaters_to_detunings(vec({0.0}), one)(0) == 0.0);
    CHECK(heaters_to_detunings(vec({2.0}), one)(0) == Approx(alpha * 4.0));

    Eigen::MatrixXd K(2, 2);
    K << 1.0, 0.1, 0.1, 1.0;
    auto two = toy_bank(K, alpha);
    const auto s = heaters_to_detunings(vec({1.5, 0.0}), two);
    CHECK(s(1) == Approx(0.1 * alpha * 1.0 * 1.5 * 1.5));
    CHECK_THROWS_AS(heaters_to_detunings(vec({-0.1, 0.0}), two), InvalidArgument);
    CHECK_THROWS_AS(heaters_to_detunings(vec({11.0, 0.0}), two), InvalidArgument);
}

TEST_CASE("heater tuning inverse model", "[heater]") {
    auto ident = toy_bank(Eigen::MatrixXd::Identity(3, 3));
    CHECK(detunings_to_heaters(Eigen::VectorXd::Zero(3), ident).isZero(0.0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd target(3);
        for (auto& v : target) v = u(rng);
        const auto I = detunings_to_heaters(target, ident);
        CHECK((heaters_to_detunings(I, ident) - target).cwiseAbs().maxCoeff() <= 1e-9);
    }

    auto coupled = toy_bank(exponential_crosstalk(4, 1.0, 20.0, 8.0));
    for (int trial = 0; trial < 20; ++trial) {
        // Feasible by construction: shifts produced by non-negative powers.
        Eigen::VectorXd I(4);
        for (auto& v : I) v = u(rng);
        const auto target = heaters_to_detunings(I, coupled);
        const auto back = detunings_to_heaters(target, coupled);
        CHECK((heaters_to_detunings(back, coupled) - target).cwiseAbs().maxCoeff() <= 1e-9);
    }

    Eigen::MatrixXd K(2, 2);
    K << 1.0, 0.5, 0.5, 1.0;
    auto two = toy_bank(K);
    CHECK_THROWS_AS(detunings_to_heaters(vec({1.0, 0.0}), two), InfeasibleError);
}

TEST_CASE("heater model validation", "[heater]") {
    Eigen::MatrixXd K(2, 2);
    K << 1.0, 1.2, 0.1, 1.0;
    HeaterModel h{1.0, 0.1, K};
    CHECK_THROWS_AS(h.validate(), InvalidArgument);
    K << 1.0, -0.1, 0.1, 1.0;
    h.crosstalk = K;
    CHECK_THROWS_AS(h.validate(), InvalidArgument);
    K << 1.0, 0.1, 0.1, 1.0;
    h.crosstalk = K;
    CHECK_NOTHROW(h.validate());
}

TEST_CASE("monotone cubic interpolant", "[interp]") {
    // A cubic is reproduced exactly by the not-a-knot spline when no limiting applies.
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(v + 0.1 * v * v + 0.01 * v * v * v);
    MonotoneCubic c(x, y);
    for (double t = 0.0; t <= 5.0; t += 0.05)
        CHECK(c(t) == Approx(t + 0.1 * t * t + 0.01 * t * t * t).margin(1e-12));
    CHECK(c.inverse(c(2.7)) == Approx(2.7).margin(1e-9));

    // Step-like data: no overshoot.
    MonotoneCubic step({0, 1, 2, 3, 4}, {0, 0, 0, 1, 1});
    double prev = -1.0;
    for (double t = 0.0; t <= 4.0; t += 0.01) {
        const double v = step(t);
        REQUIRE(v >= prev - 1e-15);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(MonotoneCubic({0, 1, 2}, {0, 2, 1}), CalibrationError);
    CHECK_THROWS_AS(MonotoneCubic({0}, {0}), CalibrationError);
    CHECK_THROWS_AS(MonotoneCubic({0, 0, 1}, {0, 1, 2}), InvalidArgument);

    MonotoneCubic three({0, 1, 3}, {0, 1, 9});
    CHECK(three(2.0) == Approx(4.0));
}

TEST_CASE("interpolation calibration", "[calibration]") {
    SECTION("12-bit converters, 20 points") {
        BankDesign d;
        d.channels = 1;
        SimulatedBench bench(make_bank(d));
        const auto c = calibrate_interpolation(bench, 0, 20);
        CHECK(bench.measurements() == 20);
        CHECK(c.report.max_error <= 0.12);
        CHECK(c.report.dB >= 9.2);
    }
    SECTION("ideal converters are limited by interpolation only") {
        BankDesign d;
        d.channels = 1;
        d.adc_bits = d.dac_bits = 0;
        SimulatedBench bench(make_bank(d));
        CHECK(calibrate_interpolation(bench, 0, 50).report.max_error <= 1e-3);
    }
    SECTION("too few points") {
        SimulatedBench bench(make_bank({}));
        CHECK_THROWS_AS(calibrate_interpolation(bench, 0, 3), InvalidArgument);
    }
    SECTION("resonance crossing the carrier is rejected") {
        BankDesign d;
        d.channels = 1;
        auto bank = make_bank(d);
        bank.dac_full_scale *= 1.5;
        SimulatedBench bench(bank);
        CHECK_THROWS_AS(calibrate_interpolation(bench, 0, 20), CalibrationError);
    }
}

TEST_CASE("calibration accuracy grows with resolution and points", "[calibration]") {
    double prev = -1.0;
    for (int bits : {4, 6, 8, 10, 12, 14, 16}) {
        const double b = calib_bits(20, bits);
        CHECK(b >= prev);
        prev = b;
    }
    prev = -1.0;
    for (std::size_t pts : {10, 20, 40}) {
        const double b = calib_bits(pts, 12);
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("model-based calibration", "[calibration]") {
    for (std::size_t n : {1u, 4u}) {
        BankDesign d;
        d.channels = n;
        SimulatedBench bench(make_bank(d));
        const auto model = calibrate_model_based(bench);
        CHECK(bench.measurements() == 34 * n);
        CHECK(model.measurements == 34 * n);
    }

    BankDesign d;
    SimulatedBench bench(make_bank(d));
    const auto model = calibrate_model_based(bench);
    REQUIRE(model.thermal);
    const auto& K = bench.truth().heater.crosstalk;
    const auto& Kh = model.thermal->crosstalk;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j)
            worst = std::max(worst, std::abs(Kh(i, j) - K(i, j)) / K(i, j));
    CHECK(worst <= 0.05);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(model.thermal->fwhm(i) == Approx(d.fwhm).epsilon(0.02));
        CHECK(model.thermal->rest_detuning(i) == Approx(d.rest_detuning * d.fwhm).epsilon(0.02));
        CHECK(model.thermal->resistance(i) == Approx(d.resistance).epsilon(1e-3));
        CHECK(model.thermal->detector_gain(i) == Approx(1.0).epsilon(1e-3));
    }

    StagePoints bad;
    bad.filter = 1;
    CHECK_THROWS_AS(calibrate_model_based(bench, bad), CalibrationError);
}

TEST_CASE("applying weights with the model", "[calibration]") {
    BankDesign d;
    SimulatedBench bench(make_bank(d));
    const auto model = calibrate_model_based(bench);
    const auto& bank = bench.truth();

    const auto zero = apply_weights(bank, model, Eigen::VectorXd::Zero(4));
    CHECK(zero.achieved.cwiseAbs().maxCoeff() <= 0.01);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd w(4);
        for (auto& v : w) v = u(rng);
        const auto r = apply_weights(bank, model, w);
        worst = std::max(worst, (r.achieved - w).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= std::pow(2.0, -3.8));

    CHECK_THROWS_AS(apply_weights(bank, model, Eigen::VectorXd::Constant(4, 0.0).eval() + vec({1.2, 0, 0, 0})),
                    InvalidArgument);
    CHECK_THROWS_AS(apply_weights(bank, model, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST_CASE("strong cross-talk makes some weight vectors infeasible", "[calibration]") {
    BankDesign d;
    d.channels = 2;
    d.decay_length = 60.0;  // neighbour coupling ~0.72 of self-heating
    SimulatedBench bench(make_bank(d));
    const auto model = calibrate_model_based(bench);
    CHECK_THROWS_AS(apply_weights(bench.truth(), model, vec({1.0, -1.0})), InfeasibleError);
    CHECK_NOTHROW(apply_weights(bench.truth(), model, vec({1.0, 1.0})));
}

TEST_CASE("identity cross-talk: joint and per-channel calibrations agree", "[calibration]") {
    BankDesign d;
    auto bank = make_bank(d);
    bank.heater.crosstalk = d.k0 * Eigen::MatrixXd::Identity(4, 4);
    SimulatedBench joint_bench(bank);
    const auto joint = calibrate_model_based(joint_bench);

    std::vector<CalibrationModel> singles;
    for (std::size_t i = 0; i < 4; ++i) {
        SimulatedBench b(single_channel_bank(bank, i));
        singles.push_back(calibrate_model_based(b));
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd w(4);
        for (auto& v : w) v = u(rng);
        const auto a = apply_weights(bank, joint, w).achieved;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto s = apply_weights(single_channel_bank(bank, i), singles[i], vec({w(ii)})).achieved;
            CHECK(std::abs(a(ii) - s(0)) <= 1e-6);
        }
    }
}

TEST_CASE("interpolation calibration drives uncoupled banks", "[calibration]") {
    BankDesign d;
    auto bank = make_bank(d);
    bank.heater.crosstalk = d.k0 * Eigen::MatrixXd::Identity(4, 4);
    SimulatedBench bench(bank);
    std::vector<AccuracyReport> reports;
    const auto model = calibrate_interpolation_all(bench, 20, &reports);
    CHECK(model.measurements == 80);
    REQUIRE(reports.size() == 4);
    const auto r = apply_weights(bank, model, vec({0.5, -0.5, 0.9, -0.9}));
    CHECK((r.achieved - vec({0.5, -0.5, 0.9, -0.9})).cwiseAbs().maxCoeff() <= reports[0].max_error + 1e-9);
}

TEST_CASE("precision under drive noise", "[calibration]") {
    SimulatedBench bench(make_bank({}), 42);
    const auto model = calibrate_model_based(bench);
    const auto w = vec({0.3, -0.2, 0.7, 0.0});
    CHECK(weight_precision(bench, model, w, 20, 0.0) == 0.0);
    const double noisy = weight_precision(bench, model, w, 200, 1e-6);
    CHECK(noisy > 0.0);
    CHECK(noisy < 0.1);
    SimulatedBench again(make_bank({}), 42);
    const auto model2 = calibrate_model_based(again);
    CHECK(weight_precision(again, model2, w, 200, 1e-6) == noisy);
}

TEST_CASE("weight accuracy conversion", "[accuracy]") {
    auto a = weight_accuracy(1.0, 0.5);
    CHECK(a.dB == Approx(3.0103).margin(1e-3));
    CHECK(a.bits == Approx(1.0));
    a = weight_accuracy(1.0, 0.120);
    CHECK(a.dB == Approx(9.2).margin(0.05));
    CHECK(a.bits == Approx(3.06).margin(0.05));
    a = weight_accuracy(1.0, 0.0625);
    CHECK(a.dB == Approx(12.04).margin(0.01));
    CHECK(a.bits == Approx(4.0));
    CHECK_THROWS_AS(weight_accuracy(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(weight_accuracy(1.0, -0.1), InvalidArgument);
}

TEST_CASE("channel count from finesse", "[scaling]") {
    CHECK(max_channel_count(368, 3.41) == 108);
    CHECK(max_channel_count(440, 3.41) == 129);
    CHECK(max_channel_count(1140, 3.41) == 334);
    CHECK(max_channel_count(3, 3.41) == 1);
    CHECK(max_channel_count(1, 3.41) == 0);
    CHECK_THROWS_AS(max_channel_count(0.0, 3.41), InvalidArgument);
    CHECK_THROWS_AS(max_channel_count(100.0, 0.5), InvalidArgument);

    long prev = 0;
    for (double F = 1.0; F < 2000.0; F *= 1.07) {
        const long n = max_channel_count(F, 3.41);
        REQUIRE(n >= prev);
        prev = n;
    }
    prev = max_channel_count(500.0, 1.0);
    for (double s = 1.0; s < 10.0; s += 0.01) {
        const long n = max_channel_count(500.0, s);
        REQUIRE(n <= prev);
        prev = n;
    }
}
