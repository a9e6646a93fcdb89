#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "photonn/csv.hpp"
#include "photonn/error.hpp"
#include "photonn/io/yaml.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/metrics/mac.hpp"
#include "photonn/metrics/reference.hpp"
#include "photonn/network/network.hpp"
#include "photonn/qp/problem.hpp"
#include "photonn/qp/solver.hpp"
#include "photonn/weightbank/accuracy.hpp"
#include "photonn/weightbank/calibration.hpp"

namespace photonn::cli {

inline constexpr const char* output_dir_env = "PHOTONN_OUTPUT_DIR";

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::uint64_t seed = 0;
    std::optional<std::string> output_dir;

    // channels
    std::optional<double> finesse;
    std::optional<double> spacing;
    // metrics
    bool table = false;
    std::optional<double> wallplug;
    std::optional<double> neurons;
    std::optional<double> fan_in;
    std::optional<double> rate;
};

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& cfg) {
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv(output_dir_env); env && *env) dir = env;
    if (cfg.output_dir) dir = *cfg.output_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
}

inline const std::string& single_input(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1)
        throw ConfigError("'" + cfg.subcommand + "' expects exactly one input file");
    return cfg.inputs.front();
}

inline double resolve(const std::optional<double>& flag, const YAML::Node& doc, const char* key, double fallback) {
    if (flag) return *flag;
    return io::get(doc, key, fallback);
}

inline void write_metadata(const std::filesystem::path& dir, const RunConfig& cfg,
                           const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    auto f = open_out(dir / "metadata.yaml");
    f << "subcommand: " << cfg.subcommand << '\n';
    f << "seed: " << cfg.seed << '\n';
    for (const auto& [k, v] : extra) f << k << ": " << v << '\n';
}

inline void write_spikes(const std::filesystem::path& p, const SpikeTrain& s) {
    auto f = open_out(p);
    f << "t_spike,peak,energy\n";
    for (const auto& e : s.events) csv::row(f, e.time, e.peak, e.energy);
}

inline int simulate(const RunConfig& cfg, std::ostream& out) {
    const auto doc = io::load_file(single_input(cfg));
    const double dt = resolve(cfg.dt, doc, "dt", 0.05);
    const double horizon = resolve(cfg.horizon, doc, "horizon", 200.0);
    const auto model = io::get<std::string>(doc, "model", "yamada");
    const auto input = io::parse_input(doc["input"]);
    const auto dir = output_dir(cfg);

    if (model == "yamada") {
        YamadaRunOptions opt;
        opt.detection = io::parse_detection(doc["detection"]);
        if (const auto init = doc["initial"])
            opt.initial = YamadaState{io::get(init, "G", 0.0), io::get(init, "Q", 0.0), io::get(init, "I", 0.0)};
        const auto traj = simulate_yamada(io::parse_yamada(doc["params"]), input, dt, horizon, opt);
        auto f = open_out(dir / "trajectory.csv");
        f << "t,G,Q,I\n";
        for (std::size_t k = 0; k < traj.t.size(); ++k)
            csv::row(f, traj.t[k], traj.states[k].G, traj.states[k].Q, traj.states[k].I);
        write_spikes(dir / "spikes.csv", traj.spikes);
        out << "spikes: " << traj.spikes.size() << '\n';
    } else if (model == "lif") {
        std::optional<double> G0;
        if (doc["G0"]) G0 = doc["G0"].as<double>();
        const auto trace = simulate_lif(io::parse_lif(doc["params"]), input, dt, horizon, G0);
        auto f = open_out(dir / "trajectory.csv");
        f << "t,G\n";
        for (std::size_t k = 0; k < trace.t.size(); ++k) csv::row(f, trace.t[k], trace.G[k]);
        write_spikes(dir / "spikes.csv", trace.spikes);
        out << "spikes: " << trace.spikes.size() << '\n';
    } else {
        throw ConfigError("unknown model '" + model + "'");
    }
    write_metadata(dir, cfg, {{"model", model}, {"dt", csv::num(dt)}, {"horizon", csv::num(horizon)}});
    return 0;
}

inline int network(const RunConfig& cfg, std::ostream& out) {
    const auto doc = io::load_file(single_input(cfg));
    const double dt = resolve(cfg.dt, doc, "dt", 0.05);
    const double horizon = resolve(cfg.horizon, doc, "horizon", 200.0);
    const auto spec = io::parse_network(doc);
    BuildOptions opt;
    const auto mode = io::get<std::string>(doc, "mode", "physical");
    if (mode == "ideal")
        opt.mode = WeightMode::Ideal;
    else if (mode != "physical")
        throw ConfigError("unknown weight mode '" + mode + "'");
    if (doc["bank"]) opt.bank = io::parse_bank_design(doc["bank"]);

    const auto net = build_network(spec, opt);
    const auto res = simulate_network(net, dt, horizon);
    const auto dir = output_dir(cfg);

    std::vector<std::pair<double, std::size_t>> events;
    for (std::size_t i = 0; i < res.spikes.size(); ++i)
        for (const auto& e : res.spikes[i].events) events.emplace_back(e.time, i);
    std::sort(events.begin(), events.end());
    auto f = open_out(dir / "network_spikes.csv");
    f << "node,t_spike\n";
    for (const auto& [t, i] : events) csv::row(f, i, t);

    for (std::size_t i = 0; i < res.output.size(); ++i) {
        auto tr = open_out(dir / ("node_" + std::to_string(i) + ".csv"));
        tr << "t,output\n";
        for (std::size_t k = 0; k < res.t.size(); ++k) csv::row(tr, res.t[k], res.output[i][k]);
    }
    write_metadata(dir, cfg, {{"mode", mode}, {"dt", csv::num(dt)}, {"horizon", csv::num(horizon)}});
    out << "nodes: " << net.size() << "\nspikes: " << res.total_spikes() << '\n';
    return 0;
}

inline int calibrate(const RunConfig& cfg, std::ostream& out) {
    const auto doc = io::load_file(single_input(cfg));
    const auto bank = io::parse_bank(doc);
    const auto c = doc["calibration"];
    const auto method = io::get<std::string>(c, "method", "model");
    SimulatedBench bench(bank, cfg.seed);
    const auto dir = output_dir(cfg);
    auto f = open_out(dir / "calibration_report.csv");
    f << "channel,max_error,bits,dB\n";

    if (method == "interpolation") {
        const auto points = io::get<std::size_t>(c, "points", 20);
        std::vector<AccuracyReport> reports;
        const auto model = calibrate_interpolation_all(bench, points, &reports);
        for (const auto& r : reports) csv::row(f, r.channel, r.max_error, r.bits, r.dB);
        out << "measurements: " << model.measurements << '\n';
    } else if (method == "model") {
        StagePoints pts;
        pts.heater = io::get<std::size_t>(c, "heater_points", pts.heater);
        pts.filter = io::get<std::size_t>(c, "filter_points", pts.filter);
        pts.amplifier = io::get<std::size_t>(c, "amplifier_points", pts.amplifier);
        const auto model = calibrate_model_based(bench, pts);
        const auto trials = io::get<std::size_t>(c, "trials", 100);
        const auto m = static_cast<Eigen::Index>(bank.size());
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::VectorXd worst = Eigen::VectorXd::Zero(m);
        for (std::size_t t = 0; t < trials; ++t) {
            Eigen::VectorXd w(m);
            for (auto& v : w) v = u(rng);
            const auto r = apply_weights(bank, model, w);
            worst = worst.cwiseMax((r.achieved - w).cwiseAbs());
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto acc = weight_accuracy(1.0, std::max(worst(i), 1e-300));
            csv::row(f, static_cast<std::size_t>(i), worst(i), acc.bits, acc.dB);
        }
        out << "measurements: " << model.measurements << '\n';
        if (const double noise = io::get(c, "drive_noise", 0.0); noise > 0.0) {
            const double prec = weight_precision(bench, model, Eigen::VectorXd::Zero(m),
                                                 io::get<std::size_t>(c, "precision_trials", 100), noise);
            out << "precision: " << csv::num(prec) << '\n';
        }
    } else {
        throw ConfigError("unknown calibration method '" + method + "'");
    }
    write_metadata(dir, cfg, {{"method", method}});
    return 0;
}

inline int channels(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.finesse || !cfg.spacing) throw ConfigError("'channels' needs --finesse and --spacing");
    out << max_channel_count(*cfg.finesse, *cfg.spacing) << '\n';
    return 0;
}

inline int solve(const RunConfig& cfg, std::ostream& out) {
    const auto doc = io::load_file(single_input(cfg));
    QpProblem p;
    if (const auto r = doc["random"])
        p = random_spd_problem(io::get<Eigen::Index>(r, "n", 10), cfg.seed, io::get(r, "condition", 100.0));
    else
        p = io::parse_qp(doc);
    HopfieldConfig hc;
    const auto s = doc["solver"];
    if (cfg.dt)
        hc.dt = *cfg.dt;
    else if (s && s["dt"])
        hc.dt = s["dt"].as<double>();
    hc.max_steps = io::get<std::size_t>(s, "max_steps", hc.max_steps);
    hc.tolerance = io::get(s, "tolerance", hc.tolerance);
    if (s && s["x0"]) hc.x0 = io::vector(s["x0"], "x0", p.size());

    const auto sol = solve_qp(p, hc);
    const auto dir = output_dir(cfg);
    auto f = open_out(dir / "solution.yaml");
    f << "x: [";
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) f << (i ? ", " : "") << csv::num(sol.x(i));
    f << "]\nobjective: " << csv::num(sol.objective) << "\nsteps: " << sol.steps
      << "\nconverged: " << (sol.converged ? "true" : "false") << "\nconvex: " << (sol.convex ? "true" : "false")
      << "\nseed: " << cfg.seed << '\n';
    auto tr = open_out(dir / "convergence.csv");
    tr << "step,objective,stationarity\n";
    for (std::size_t k = 0; k < sol.trajectory.objective.size(); ++k)
        csv::row(tr, k, sol.trajectory.objective[k], sol.trajectory.stationarity[k]);
    out << "objective: " << csv::num(sol.objective) << "\nsteps: " << sol.steps
        << "\nconverged: " << (sol.converged ? "true" : "false") << '\n';
    if (!sol.convex) out << "warning: Q is not positive semidefinite; convergence is not guaranteed\n";
    return 0;
}

inline int metrics(const RunConfig& cfg, std::ostream& out) {
    if (cfg.table) {
        print_reference_table(out);
        return 0;
    }
    if (!cfg.wallplug || !cfg.neurons || !cfg.fan_in || !cfg.rate)
        throw ConfigError("'metrics' needs --table or all of --wallplug --neurons --fan-in --rate");
    const double e = energy_per_mac(*cfg.wallplug, *cfg.neurons, *cfg.fan_in, *cfg.rate);
    const auto t = total_mac_throughput(*cfg.neurons, *cfg.fan_in, *cfg.rate);
    out << "energy_per_mac_J: " << csv::num(e) << "\nenergy_per_mac_pJ: " << csv::num(e * 1e12)
        << "\nthroughput_MAC_per_s: " << csv::num(t.macs_per_second) << (t.saturated ? " (saturated)" : "") << '\n';
    return 0;
}

}  // namespace detail

/// Dispatches one subcommand. Returns 0 on success; any library error is
/// reported on `err` and yields a non-zero status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.subcommand == "simulate") return detail::simulate(cfg, out);
        if (cfg.subcommand == "network") return detail::network(cfg, out);
        if (cfg.subcommand == "calibrate") return detail::calibrate(cfg, out);
        if (cfg.subcommand == "channels") return detail::channels(cfg, out);
        if (cfg.subcommand == "solve-qp") return detail::solve(cfg, out);
        if (cfg.subcommand == "metrics") return detail::metrics(cfg, out);
        err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << cfg.subcommand << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << cfg.subcommand << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace photonn::cli
