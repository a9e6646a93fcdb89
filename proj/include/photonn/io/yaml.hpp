#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <yaml-cpp/yaml.h>

#include "photonn/error.hpp"
#include "photonn/laser/input_signal.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/network/spec.hpp"
#include "photonn/qp/problem.hpp"
#include "photonn/weightbank/bank.hpp"

namespace photonn::io {

inline YAML::Node load_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("file not found: " + path.string());
    try {
        return YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace detail {

template <typename T>
T get(const YAML::Node& n, const std::string& key, T fallback) {
    if (!n || !n[key]) return fallback;
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("key '" + key + "' has the wrong type");
    }
}

template <typename T>
T require_key(const YAML::Node& n, const std::string& key) {
    if (!n || !n[key]) throw ConfigError("missing required key '" + key + "'");
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("key '" + key + "' has the wrong type");
    }
}

inline Eigen::MatrixXd matrix(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) throw ConfigError(what + " must be a list of rows");
    const auto rows = static_cast<Eigen::Index>(n.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const auto cols = static_cast<Eigen::Index>(n[0].size());
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto row = n[static_cast<std::size_t>(i)];
        if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError(what + " rows must all have the same length");
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = row[static_cast<std::size_t>(j)].as<double>();
    }
    return M;
}

inline Eigen::VectorXd vector(const YAML::Node& n, const std::string& what, Eigen::Index size = -1) {
    if (size >= 0 && n.IsScalar()) return Eigen::VectorXd::Constant(size, n.as<double>());
    if (!n.IsSequence()) throw ConfigError(what + " must be a list");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = n[i].as<double>();
    if (size >= 0 && v.size() != size) throw ConfigError(what + " has the wrong length");
    return v;
}

}  // namespace detail

/// input: {bias, impulses: [[t, area], ...] or [{t, area}], samples: {t0, dt, values}}
inline InputSignal parse_input(const YAML::Node& n) {
    if (!n) return {};
    InputSignal in;
    if (n["samples"]) {
        const auto s = n["samples"];
        in = InputSignal::sampled(detail::get(s, "t0", 0.0), detail::require_key<double>(s, "dt"),
                                  detail::require_key<std::vector<double>>(s, "values"));
    }
    in.set_bias(detail::get(n, "bias", 0.0));
    if (n["impulses"]) {
        for (const auto& imp : n["impulses"]) {
            if (imp.IsSequence() && imp.size() == 2)
                in.add_impulse(imp[0].as<double>(), imp[1].as<double>());
            else
                in.add_impulse(detail::require_key<double>(imp, "t"), detail::require_key<double>(imp, "area"));
        }
    }
    return in;
}

inline YamadaParams parse_yamada(const YAML::Node& n) {
    YamadaParams p;
    p.A = detail::get(n, "A", p.A);
    p.B = detail::get(n, "B", p.B);
    p.a = detail::get(n, "a", p.a);
    p.gamma_G = detail::get(n, "gamma_G", p.gamma_G);
    p.gamma_Q = detail::get(n, "gamma_Q", p.gamma_Q);
    p.gamma_I = detail::get(n, "gamma_I", p.gamma_I);
    p.epsilon = detail::get(n, "epsilon", p.epsilon);
    return p;
}

inline LifParams parse_lif(const YAML::Node& n) {
    LifParams p;
    p.gamma_G = detail::get(n, "gamma_G", p.gamma_G);
    p.A = detail::get(n, "A", p.A);
    p.G_thresh = detail::get(n, "G_thresh", p.G_thresh);
    p.G_reset = detail::get(n, "G_reset", p.G_reset);
    p.refractory = detail::get(n, "refractory", p.refractory);
    p.allow_self_firing = detail::get(n, "allow_self_firing", p.allow_self_firing);
    return p;
}

inline SpikeDetection parse_detection(const YAML::Node& n) {
    SpikeDetection d;
    d.threshold = detail::get(n, "threshold", d.threshold);
    d.dead_time = detail::get(n, "dead_time", d.dead_time);
    return d;
}

inline BankDesign parse_bank_design(const YAML::Node& n) {
    BankDesign d;
    d.channels = detail::get<std::size_t>(n, "channels", d.channels);
    d.first_carrier = detail::get(n, "first_carrier", d.first_carrier);
    d.channel_spacing = detail::get(n, "channel_spacing", d.channel_spacing);
    d.fwhm = detail::get(n, "fwhm", d.fwhm);
    d.fsr = detail::get(n, "fsr", d.fsr);
    d.rest_detuning = detail::get(n, "rest_detuning", d.rest_detuning);
    d.resistance = detail::get(n, "resistance", d.resistance);
    d.thermo_optic = detail::get(n, "thermo_optic", d.thermo_optic);
    d.k0 = detail::get(n, "k0", d.k0);
    d.heater_pitch = detail::get(n, "heater_pitch", d.heater_pitch);
    d.decay_length = detail::get(n, "decay_length", d.decay_length);
    d.adc_bits = detail::get(n, "adc_bits", d.adc_bits);
    d.dac_bits = detail::get(n, "dac_bits", d.dac_bits);
    d.detector_gain = detail::get(n, "detector_gain", d.detector_gain);
    return d;
}

/// Either `design: {...}` (generated bank) or explicit filters, channels and heater.
inline WeightBank parse_bank(const YAML::Node& n) {
    if (n["design"]) return make_bank(parse_bank_design(n["design"]));
    WeightBank b;
    if (!n["filters"]) throw ConfigError("bank needs either 'design' or 'filters'");
    for (const auto& f : n["filters"])
        b.filters.push_back({detail::require_key<double>(f, "lambda0"), detail::require_key<double>(f, "fwhm"),
                             detail::require_key<double>(f, "fsr")});
    b.channels = detail::require_key<std::vector<double>>(n, "channels");
    const auto h = n["heater"];
    if (!h) throw ConfigError("missing required key 'heater'");
    b.heater.resistance = detail::require_key<double>(h, "resistance");
    b.heater.thermo_optic = detail::require_key<double>(h, "thermo_optic");
    if (!h["crosstalk"]) throw ConfigError("missing required key 'crosstalk'");
    b.heater.crosstalk = detail::matrix(h["crosstalk"], "crosstalk");
    b.adc_bits = detail::get(n, "adc_bits", b.adc_bits);
    b.dac_bits = detail::get(n, "dac_bits", b.dac_bits);
    b.dac_full_scale = detail::require_key<double>(n, "dac_full_scale");
    b.detector_gain = detail::get(n, "detector_gain", b.detector_gain);
    b.validate();
    return b;
}

inline NeuronModel parse_neuron(const YAML::Node& n) {
    const auto kind = detail::get<std::string>(n, "model", "yamada");
    const auto params = n["params"];
    if (kind == "yamada") return parse_yamada(params);
    if (kind == "lif") return parse_lif(params);
    if (kind == "relay") return RelayNode{};
    if (kind == "clip") {
        ClipNode c;
        c.lower = detail::get(params, "lower", c.lower);
        c.upper = detail::get(params, "upper", c.upper);
        c.bias = detail::get(params, "bias", c.bias);
        c.initial = detail::get(params, "initial", c.initial);
        return c;
    }
    throw ConfigError("unknown neuron model '" + kind + "'");
}

inline NetworkSpec parse_network(const YAML::Node& n) {
    NetworkSpec s;
    if (!n["nodes"] || !n["nodes"].IsSequence()) throw ConfigError("network needs a 'nodes' list");
    for (const auto& node : n["nodes"]) {
        NetworkNode nn;
        nn.model = parse_neuron(node);
        nn.wavelength = detail::require_key<double>(node, "wavelength");
        nn.loop = detail::get(node, "loop", 0);
        if (node["emit_loop"]) nn.emit_loop = node["emit_loop"].as<int>();
        nn.external = parse_input(node["input"]);
        s.nodes.push_back(std::move(nn));
    }
    const auto N = static_cast<Eigen::Index>(s.nodes.size());
    s.weights = n["weights"] ? detail::matrix(n["weights"], "weights") : Eigen::MatrixXd::Zero(N, N);
    if (n["delays"]) s.edge_delays = detail::matrix(n["delays"], "delays");
    if (n["propagation_delay"]) s.propagation_delay = n["propagation_delay"].as<double>();
    s.drive_gain = detail::get(n, "drive_gain", s.drive_gain);
    s.output_coupling = detail::get(n, "output_coupling", s.output_coupling);
    s.detection = parse_detection(n["detection"]);
    if (const auto c = n["capacity"]) {
        s.capacity.finesse = detail::get(c, "finesse", s.capacity.finesse);
        s.capacity.spacing_linewidths = detail::get(c, "spacing", s.capacity.spacing_linewidths);
    }
    if (n["exports"]) {
        for (const auto& e : n["exports"])
            add_export_node(s, detail::require_key<int>(e, "source_loop"), detail::require_key<int>(e, "dest_loop"),
                            detail::require_key<double>(e, "wavelength"),
                            detail::require_key<std::vector<double>>(e, "taps"));
    }
    return s;
}

inline QpProblem parse_qp(const YAML::Node& n) {
    if (!n["Q"]) throw ConfigError("missing required key 'Q'");
    if (!n["c"]) throw ConfigError("missing required key 'c'");
    QpProblem p;
    p.Q = detail::matrix(n["Q"], "Q");
    p.c = detail::vector(n["c"], "c");
    const auto size = p.c.size();
    p.lower = n["lower"] ? detail::vector(n["lower"], "lower", size) : Eigen::VectorXd::Constant(size, -1.0);
    p.upper = n["upper"] ? detail::vector(n["upper"], "upper", size) : Eigen::VectorXd::Constant(size, 1.0);
    return p;
}

using detail::get;
using detail::vector;

}  // namespace photonn::io
