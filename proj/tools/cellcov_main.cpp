// cellcov - outage and handover probabilities of cellular networks, via
// integral formulas (analytic), Monte Carlo of the Poisson model (simulate),
// and a hexagonal-lattice baseline (hex). All subcommands share one JSON
// config; results land in a fixed-schema CSV.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellcov/experiment.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 0;
    long snapshots = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* snapshots_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        cmd->add_option("--output", output_path,
                        "result path (default: the config's output_path, else stdout)");
        seed_opt = cmd->add_option("--seed", seed, "override the config's RNG seed");
        snapshots_opt = cmd->add_option("--snapshots", snapshots,
                                        "override the config's snapshot count");
    }
};

cellcov::ExperimentConfig load_config(const CommonOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + opts.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    cellcov::ExperimentConfig config = cellcov::parse_config(text.str());
    if (opts.seed_opt->count() > 0) config.seed = opts.seed;
    if (opts.snapshots_opt->count() > 0) {
        if (opts.snapshots < 1)
            throw std::runtime_error("--snapshots: must be >= 1");
        config.snapshots = opts.snapshots;
    }
    if (!opts.output_path.empty()) config.output_path = opts.output_path;
    return config;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    out.flush();
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

int run_rows(const CommonOptions& opts, const cellcov::ModelSelection& models,
             bool force_hex) {
    cellcov::ExperimentConfig config = load_config(opts);
    if (force_hex) config.hex_enabled = true;
    const std::vector<cellcov::ResultRow> rows = cellcov::run_sweep(config, models);
    write_output(config.output_path, cellcov::render_csv(config, rows));
    return 0;
}

int run_compare(const CommonOptions& opts) {
    cellcov::ExperimentConfig config = load_config(opts);
    config.hex_enabled = true;
    cellcov::ModelSelection models;
    models.poisson_mc = false;
    const std::vector<cellcov::ResultRow> rows = cellcov::run_sweep(config, models);
    const cellcov::GapReport report =
        cellcov::compare_models(rows, config.compare_level);
    nlohmann::json j;
    j["level"] = report.level;
    j["poisson_model"] = report.poisson_model;
    j["poisson_db"] = report.poisson_db;
    j["hex_db"] = report.hex_db;
    j["gap_db"] = report.gap_db;
    write_output(config.output_path, j.dump(2) + "\n");
    return 0;
}

void fail_json(const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"outage and handover probabilities of Poisson and hexagonal "
                 "cellular networks"};
    app.require_subcommand(1);

    CLI::App* analytic = app.add_subcommand(
        "analytic", "integral-formula rows over the config's sweep");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Poisson Monte Carlo rows over the config's sweep");
    CLI::App* hex = app.add_subcommand(
        "hex", "hexagonal-lattice Monte Carlo rows over the config's sweep");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "all configured models side by side, one CSV");
    CLI::App* compare = app.add_subcommand(
        "compare", "dB gap between the Poisson and hexagonal outage curves");

    CommonOptions analytic_opts, simulate_opts, hex_opts, sweep_opts, compare_opts;
    analytic_opts.attach(analytic);
    simulate_opts.attach(simulate);
    hex_opts.attach(hex);
    sweep_opts.attach(sweep);
    compare_opts.attach(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail_json(e.what());
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    }

    try {
        if (analytic->parsed()) {
            cellcov::ModelSelection models{true, false, false};
            return run_rows(analytic_opts, models, false);
        }
        if (simulate->parsed()) {
            cellcov::ModelSelection models{false, true, false};
            return run_rows(simulate_opts, models, false);
        }
        if (hex->parsed()) {
            cellcov::ModelSelection models{false, false, true};
            return run_rows(hex_opts, models, true);
        }
        if (sweep->parsed()) return run_rows(sweep_opts, cellcov::ModelSelection{}, false);
        if (compare->parsed()) return run_compare(compare_opts);
        fail_json("no subcommand selected");
        return 1;
    } catch (const std::exception& e) {
        fail_json(e.what());
        return 1;
    }
}
