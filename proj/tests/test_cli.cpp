#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "photonn/cli/run.hpp"

namespace fs = std::filesystem;
using photonn::cli::RunConfig;
using photonn::cli::run;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("photonn_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Captured {
    int status;
    std::string out;
    std::string err;
};

Captured invoke(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int status = run(cfg, out, err);
    return {status, out.str(), err.str()};
}

}  // namespace

TEST_CASE("channels subcommand", "[cli]") {
    RunConfig cfg;
    cfg.subcommand = "channels";
    cfg.finesse = 368;
    cfg.spacing = 3.41;
    const auto r = invoke(cfg);
    CHECK(r.status == 0);
    CHECK(r.out == "108\n");
    cfg.spacing.reset();
    CHECK(invoke(cfg).status != 0);
}

TEST_CASE("missing input file is a diagnosed failure", "[cli]") {
    for (const char* sub : {"simulate", "network", "calibrate", "solve-qp"}) {
        RunConfig cfg;
        cfg.subcommand = sub;
        cfg.inputs = {"/nonexistent/photonn.yaml"};
        const auto r = invoke(cfg);
        CHECK(r.status != 0);
        CHECK(r.err.find("file not found") != std::string::npos);
    }
    RunConfig bad;
    bad.subcommand = "frobnicate";
    CHECK(invoke(bad).status != 0);
}

TEST_CASE("simulate writes trajectory and spikes", "[cli]") {
    TempDir dir;
    const auto cfg_path = dir.write("neuron.yaml", R"(
model: yamada
dt: 0.05
horizon: 100
input:
  impulses: [[5.0, 0.6]]
)");
    RunConfig cfg;
    cfg.subcommand = "simulate";
    cfg.inputs = {cfg_path.string()};
    cfg.output_dir = (dir.path / "out").string();
    cfg.seed = 42;
    const auto r = invoke(cfg);
    REQUIRE(r.status == 0);
    CHECK(r.out == "spikes: 1\n");

    const auto traj = slurp(dir.path / "out" / "trajectory.csv");
    CHECK(traj.rfind("t,G,Q,I\n", 0) == 0);
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 2002);
    const auto spikes = slurp(dir.path / "out" / "spikes.csv");
    CHECK(spikes.rfind("t_spike,peak,energy\n", 0) == 0);
    CHECK(std::count(spikes.begin(), spikes.end(), '\n') == 2);
    CHECK(slurp(dir.path / "out" / "metadata.yaml").find("seed: 42") != std::string::npos);

    // Command-line step overrides the file, and the step limit is enforced.
    cfg.dt = 5.0;
    const auto too_big = invoke(cfg);
    CHECK(too_big.status != 0);
    CHECK(too_big.err.find("dt") != std::string::npos);
}

TEST_CASE("output directory comes from the environment unless given", "[cli]") {
    TempDir dir;
    const auto cfg_path = dir.write("lif.yaml", "model: lif\ndt: 0.01\nhorizon: 5\ninput: {bias: 2.0}\n");
    RunConfig cfg;
    cfg.subcommand = "simulate";
    cfg.inputs = {cfg_path.string()};
    const auto env_dir = dir.path / "env";
    ::setenv(photonn::cli::output_dir_env, env_dir.c_str(), 1);
    REQUIRE(invoke(cfg).status == 0);
    CHECK(fs::exists(env_dir / "trajectory.csv"));

    cfg.output_dir = (dir.path / "flag").string();
    REQUIRE(invoke(cfg).status == 0);
    CHECK(fs::exists(dir.path / "flag" / "trajectory.csv"));
    ::unsetenv(photonn::cli::output_dir_env);
}

TEST_CASE("network subcommand", "[cli]") {
    TempDir dir;
    const auto cfg_path = dir.write("pair.yaml", R"(
mode: ideal
dt: 0.05
horizon: 600
drive_gain: 0.003
propagation_delay: 50
nodes:
  - {model: yamada, wavelength: 1550.0, input: {impulses: [[5.0, 0.6]]}}
  - {model: yamada, wavelength: 1551.0}
weights: [[0, 1], [1, 0]]
)");
    RunConfig cfg;
    cfg.subcommand = "network";
    cfg.inputs = {cfg_path.string()};
    cfg.output_dir = dir.path.string();
    const auto r = invoke(cfg);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("nodes: 2") != std::string::npos);
    const auto spikes = slurp(dir.path / "network_spikes.csv");
    CHECK(spikes.rfind("node,t_spike\n", 0) == 0);
    CHECK(std::count(spikes.begin(), spikes.end(), '\n') >= 5);
    CHECK(fs::exists(dir.path / "node_1.csv"));

    dir.write("bad.yaml", "nodes:\n  - {model: yamada}\n");
    cfg.inputs = {(dir.path / "bad.yaml").string()};
    const auto bad = invoke(cfg);
    CHECK(bad.status != 0);
    CHECK(bad.err.find("wavelength") != std::string::npos);
}

TEST_CASE("calibrate subcommand", "[cli]") {
    TempDir dir;
    const auto cfg_path = dir.write("bank.yaml", R"(
design: {channels: 4, adc_bits: 12, dac_bits: 12}
calibration: {method: model, trials: 50}
)");
    RunConfig cfg;
    cfg.subcommand = "calibrate";
    cfg.inputs = {cfg_path.string()};
    cfg.output_dir = dir.path.string();
    const auto r = invoke(cfg);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("measurements: 136") != std::string::npos);
    const auto report = slurp(dir.path / "calibration_report.csv");
    CHECK(report.rfind("channel,max_error,bits,dB\n", 0) == 0);
    CHECK(std::count(report.begin(), report.end(), '\n') == 5);
}

TEST_CASE("solve-qp subcommand", "[cli]") {
    TempDir dir;
    const auto cfg_path = dir.write("qp.yaml", R"(
Q: [[2.0, 0.5], [0.5, 1.0]]
c: [-1.0, 3.0]
solver: {tolerance: 1.0e-10}
)");
    RunConfig cfg;
    cfg.subcommand = "solve-qp";
    cfg.inputs = {cfg_path.string()};
    cfg.output_dir = dir.path.string();
    const auto r = invoke(cfg);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("converged: true") != std::string::npos);
    const auto sol = YAML::LoadFile((dir.path / "solution.yaml").string());
    const auto x = sol["x"].as<std::vector<double>>();
    REQUIRE(x.size() == 2);
    CHECK(x[0] == Catch::Approx(0.75).margin(1e-8));
    CHECK(x[1] == -1.0);

    dir.write("nonconvex.yaml", "Q: [[1, 0], [0, -1]]\nc: [0.1, 0.1]\n");
    cfg.inputs = {(dir.path / "nonconvex.yaml").string()};
    const auto nc = invoke(cfg);
    CHECK(nc.status == 0);
    CHECK(nc.out.find("warning") != std::string::npos);
}

TEST_CASE("metrics subcommand", "[cli]") {
    RunConfig cfg;
    cfg.subcommand = "metrics";
    cfg.table = true;
    const auto t = invoke(cfg);
    REQUIRE(t.status == 0);
    CHECK(t.out.find("TrueNorth | 2.5 kHz | .27 | 256 | 4.9 | 5") != std::string::npos);

    cfg.table = false;
    cfg.wallplug = 1.0;
    cfg.neurons = 1000;
    cfg.fan_in = 100;
    cfg.rate = 1e6;
    const auto e = invoke(cfg);
    REQUIRE(e.status == 0);
    CHECK(e.out.find("energy_per_mac_pJ: 10") != std::string::npos);
    cfg.rate.reset();
    CHECK(invoke(cfg).status != 0);
}
