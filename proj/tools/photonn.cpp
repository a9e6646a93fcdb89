#include <CLI11.hpp>

#include <iostream>

#include "photonn/cli/run.hpp"

int main(int argc, char** argv) {
    photonn::cli::RunConfig cfg;
    CLI::App app{"Photonic spiking network simulator"};
    app.require_subcommand(1);

    auto common = [&cfg](CLI::App* sub) {
        sub->add_option("--dt", cfg.dt, "Integration step");
        sub->add_option("--horizon", cfg.horizon, "Simulated time span");
        sub->add_option("--seed", cfg.seed, "Seed for randomised instances and noise");
        sub->add_option("--output-dir", cfg.output_dir, "Directory for output files");
    };

    auto* simulate = app.add_subcommand("simulate", "Integrate a single Yamada or LIF neuron");
    simulate->add_option("config", cfg.inputs, "Experiment file")->required();
    common(simulate);

    auto* network = app.add_subcommand("network", "Co-simulate a broadcast-and-weight network");
    network->add_option("config", cfg.inputs, "Network file")->required();
    common(network);

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate a simulated weight bank");
    calibrate->add_option("bank", cfg.inputs, "Bank file")->required();
    common(calibrate);

    auto* channels = app.add_subcommand("channels", "Channel count supported by a ring finesse");
    channels->add_option("--finesse", cfg.finesse, "Ring finesse")->required();
    channels->add_option("--spacing", cfg.spacing, "Minimum channel spacing in linewidths")->required();

    auto* qp = app.add_subcommand("solve-qp", "Solve a box-constrained QP with Hopfield dynamics");
    qp->add_option("problem", cfg.inputs, "QP file")->required();
    common(qp);

    auto* metrics = app.add_subcommand("metrics", "MAC energy and throughput");
    metrics->add_flag("--table", cfg.table, "Print the reference processor comparison");
    metrics->add_option("--wallplug", cfg.wallplug, "Wall-plug power (W)");
    metrics->add_option("--neurons", cfg.neurons, "Neuron count");
    metrics->add_option("--fan-in", cfg.fan_in, "Synapses per neuron");
    metrics->add_option("--rate", cfg.rate, "Per-synapse MAC rate (1/s)");

    CLI11_PARSE(app, argc, argv);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return photonn::cli::run(cfg, std::cout, std::cerr);
}
