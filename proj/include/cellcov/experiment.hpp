#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cellcov/montecarlo.hpp"
#include "cellcov/propagation.hpp"

namespace cellcov {

// ---------------------------------------------------------------------------
// Experiment configuration
//
// Configs are flat JSON documents with user-facing units (dB, dBm). The dB
// fields are kept verbatim so that emit_config / parse_config round-trip
// exactly; linear-unit conversions happen in make_environment.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    double density_per_m2 = 0.0;  // lambda_B, required
    double power_dbm = 0.0;

    std::string pathloss_model = "exponent";  // "exponent" | "modified_exponent"
    double pathloss_k_db = -20.0;
    double pathloss_gamma = 4.0;
    double pathloss_r0_m = 0.0;  // required > 0 for modified_exponent

    std::string shadowing_model = "none";  // "none" | "lognormal"
    double shadowing_sigma_db = 8.0;

    bool noise_off = true;   // noise_dbm: "off" in JSON
    double noise_dbm = 0.0;  // meaningful only when noise_off is false
    double mu = 1.0;

    int reuse_k = 1;
    bool beamforming_enabled = false;
    int beamforming_n_t = 8;

    double threshold_db = 10.0;  // fixed T when the sweep runs over another axis
    int slots = 3;               // handover window n

    std::string sweep_name = "threshold_db";  // threshold_db | gamma | reuse_k | slots
    double sweep_start = -10.0;
    double sweep_stop = 20.0;
    double sweep_step = 1.0;

    double region_radius_m = 10000.0;
    long snapshots = 10000;
    std::uint64_t seed = 1;
    int workers = 1;

    bool hex_enabled = false;
    int hex_rings = 6;
    int hex_i = 2;
    int hex_j = 1;

    double compare_level = 0.5;
    std::string output_path;  // empty: stdout

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses a flat JSON config. Unknown keys, type mismatches, missing required
// keys (density_per_m2, and noise_dbm must be present as a number or "off"),
// and out-of-range values are rejected with the offending key in the message.
ExperimentConfig parse_config(const std::string& json_text);

// Canonical JSON emission (sorted keys, round-trip-exact numbers).
std::string emit_config(const ExperimentConfig& config);

// Derived engine inputs. Both validate and throw on inconsistent configs.
PropagationEnvironment make_environment(const ExperimentConfig& config);
SimConfig make_sim(const ExperimentConfig& config);

// Sweep grid: start, start + step, ... up to stop (inclusive up to rounding).
std::vector<double> sweep_values(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

struct ResultRow {
    std::string model;  // poisson_analytic | poisson_mc | hexagonal_mc
    std::string sweep_name;
    double sweep_value = 0.0;
    double threshold_db = 0.0;
    double gamma = 0.0;
    int reuse_k = 1;
    int slots = 1;
    std::optional<double> p_outage;
    std::optional<double> p_outage_stderr;  // empty on analytic rows
    std::optional<double> p_handover;
    std::optional<double> p_handover_stderr;
    std::string error;  // empty on success; row-local failures do not abort the sweep
};

struct ModelSelection {
    bool poisson_analytic = true;
    bool poisson_mc = true;
    bool hexagonal_mc = true;  // additionally gated by config.hex_enabled
};

// Evaluates every selected model at every sweep point. Rows are ordered by
// sweep value, then poisson_analytic, poisson_mc, hexagonal_mc. A failure at
// one point lands in that row's error column and the sweep keeps going.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config,
                                 const ModelSelection& models = {});

// ---------------------------------------------------------------------------
// CSV results
//
// Fixed schema: model, sweep_name, sweep_value, threshold_db, gamma, reuse_k,
// slots, p_outage, p_outage_stderr, p_handover, p_handover_stderr, error.
// Probabilities carry 6 significant digits. Fields containing commas, quotes,
// or newlines are quoted RFC-4180 style. The header is preceded by provenance
// comments (tool version, config hash, seed); the hash covers the config with
// execution-only knobs (workers, output_path) normalized away, so reruns on a
// different worker count produce byte-identical files.
// ---------------------------------------------------------------------------

extern const char* const kResultHeader;

std::uint64_t config_hash(const ExperimentConfig& config);
std::string render_csv(const ExperimentConfig& config, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Model comparison
// ---------------------------------------------------------------------------

struct GapReport {
    double level = 0.5;
    std::string poisson_model;  // the Poisson curve used: analytic if present, else MC
    double poisson_db = 0.0;    // threshold_db where the Poisson curve crosses level
    double hex_db = 0.0;        // threshold_db where the hexagonal curve crosses level
    double gap_db = 0.0;        // hex_db - poisson_db: extra threshold the lattice sustains
};

// Locates the threshold (dB) at which each model's outage curve crosses the
// given level, by linear interpolation between adjacent sweep points, and
// reports the horizontal gap. Requires a threshold_db sweep; throws if either
// curve never brackets the level.
GapReport compare_models(const std::vector<ResultRow>& rows, double level);

}  // namespace cellcov
