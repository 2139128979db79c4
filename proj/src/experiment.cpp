#include "cellcov/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "cellcov/analytic.hpp"
#include "cellcov/hexgrid.hpp"

namespace cellcov {

namespace {

using nlohmann::json;

[[noreturn]] void fail_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

double as_number(const json& value, const std::string& key) {
    if (!value.is_number()) fail_key(key, "expected a number");
    return value.get<double>();
}

long as_integer(const json& value, const std::string& key) {
    if (!value.is_number_integer()) fail_key(key, "expected an integer");
    return value.get<long>();
}

bool as_boolean(const json& value, const std::string& key) {
    if (!value.is_boolean()) fail_key(key, "expected true or false");
    return value.get<bool>();
}

std::string as_string(const json& value, const std::string& key) {
    if (!value.is_string()) fail_key(key, "expected a string");
    return value.get<std::string>();
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

void validate_config(const ExperimentConfig& config) {
    if (!(config.density_per_m2 > 0.0) || !std::isfinite(config.density_per_m2))
        fail_key("density_per_m2", "must be a positive BS density");
    if (!std::isfinite(config.power_dbm)) fail_key("power_dbm", "must be finite");

    if (config.pathloss_model != "exponent" && config.pathloss_model != "modified_exponent")
        fail_key("pathloss_model", "expected \"exponent\" or \"modified_exponent\"");
    if (!(config.pathloss_gamma > 2.0))
        fail_key("pathloss_gamma", "must be > 2 (slower decay has infinite received power)");
    if (config.pathloss_model == "modified_exponent" && !(config.pathloss_r0_m > 0.0))
        fail_key("pathloss_r0_m", "must be > 0 for the modified_exponent model");

    if (config.shadowing_model != "none" && config.shadowing_model != "lognormal")
        fail_key("shadowing_model", "expected \"none\" or \"lognormal\"");
    if (!(config.shadowing_sigma_db >= 0.0))
        fail_key("shadowing_sigma_db", "must be >= 0");
    if (!config.noise_off && !std::isfinite(config.noise_dbm))
        fail_key("noise_dbm", "must be finite or \"off\"");
    if (!(config.mu > 0.0)) fail_key("mu", "must be > 0");
    if (config.reuse_k < 1) fail_key("reuse_k", "must be >= 1");
    if (config.beamforming_n_t < 1) fail_key("beamforming_n_t", "must be >= 1");

    if (!std::isfinite(config.threshold_db)) fail_key("threshold_db", "must be finite");
    if (config.slots < 1 || config.slots > 20)
        fail_key("slots", "must be between 1 and 20");

    const bool known_axis =
        config.sweep_name == "threshold_db" || config.sweep_name == "gamma" ||
        config.sweep_name == "reuse_k" || config.sweep_name == "slots";
    if (!known_axis)
        fail_key("sweep_name", "expected threshold_db, gamma, reuse_k, or slots");
    if (!(config.sweep_step > 0.0)) fail_key("sweep_step", "must be > 0");
    if (!(config.sweep_stop >= config.sweep_start))
        fail_key("sweep_stop", "must be >= sweep_start");
    const double span = (config.sweep_stop - config.sweep_start) / config.sweep_step;
    if (!(span <= 10000.0)) fail_key("sweep_step", "more than 10001 sweep points");
    for (double value : sweep_values(config)) {
        if (config.sweep_name == "gamma" && !(value > 2.0))
            fail_key("sweep_start", "gamma sweep values must be > 2");
        if (config.sweep_name == "reuse_k" && (!near_integer(value) || value < 1.0))
            fail_key("sweep_start", "reuse_k sweep values must be integers >= 1");
        if (config.sweep_name == "slots" &&
            (!near_integer(value) || value < 1.0 || value > 20.0))
            fail_key("sweep_start", "slots sweep values must be integers in 1..20");
    }

    if (!(config.region_radius_m > 0.0)) fail_key("region_radius_m", "must be > 0");
    if (config.snapshots < 1) fail_key("snapshots", "must be >= 1");
    if (config.workers < 1) fail_key("workers", "must be >= 1");

    if (config.hex_enabled) {
        if (config.hex_rings < 1) fail_key("hex_rings", "must be >= 1");
        if (config.hex_i < 0 || config.hex_j < 0 || (config.hex_i == 0 && config.hex_j == 0))
            fail_key("hex_i", "shift (i, j) must be nonnegative and not both zero");
    }
    if (!(config.compare_level > 0.0 && config.compare_level < 1.0))
        fail_key("compare_level", "must be strictly between 0 and 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument("config: top level must be a JSON object");

    ExperimentConfig config;
    bool have_density = false;
    bool have_noise = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "density_per_m2") {
            config.density_per_m2 = as_number(value, key);
            have_density = true;
        } else if (key == "power_dbm") {
            config.power_dbm = as_number(value, key);
        } else if (key == "pathloss_model") {
            config.pathloss_model = as_string(value, key);
        } else if (key == "pathloss_k_db") {
            config.pathloss_k_db = as_number(value, key);
        } else if (key == "pathloss_gamma") {
            config.pathloss_gamma = as_number(value, key);
        } else if (key == "pathloss_r0_m") {
            config.pathloss_r0_m = as_number(value, key);
        } else if (key == "shadowing_model") {
            config.shadowing_model = as_string(value, key);
        } else if (key == "shadowing_sigma_db") {
            config.shadowing_sigma_db = as_number(value, key);
        } else if (key == "noise_dbm") {
            if (value.is_string()) {
                if (value.get<std::string>() != "off")
                    fail_key(key, "expected a number in dBm or \"off\"");
                config.noise_off = true;
                config.noise_dbm = 0.0;
            } else {
                config.noise_off = false;
                config.noise_dbm = as_number(value, key);
            }
            have_noise = true;
        } else if (key == "mu") {
            config.mu = as_number(value, key);
        } else if (key == "reuse_k") {
            config.reuse_k = static_cast<int>(as_integer(value, key));
        } else if (key == "beamforming_enabled") {
            config.beamforming_enabled = as_boolean(value, key);
        } else if (key == "beamforming_n_t") {
            config.beamforming_n_t = static_cast<int>(as_integer(value, key));
        } else if (key == "threshold_db") {
            config.threshold_db = as_number(value, key);
        } else if (key == "slots") {
            config.slots = static_cast<int>(as_integer(value, key));
        } else if (key == "sweep_name") {
            config.sweep_name = as_string(value, key);
        } else if (key == "sweep_start") {
            config.sweep_start = as_number(value, key);
        } else if (key == "sweep_stop") {
            config.sweep_stop = as_number(value, key);
        } else if (key == "sweep_step") {
            config.sweep_step = as_number(value, key);
        } else if (key == "region_radius_m") {
            config.region_radius_m = as_number(value, key);
        } else if (key == "snapshots") {
            config.snapshots = as_integer(value, key);
        } else if (key == "seed") {
            if (!value.is_number_integer())
                fail_key(key, "expected a nonnegative integer");
            if (!value.is_number_unsigned() && value.get<long long>() < 0)
                fail_key(key, "expected a nonnegative integer");
            config.seed = value.get<std::uint64_t>();
        } else if (key == "workers") {
            config.workers = static_cast<int>(as_integer(value, key));
        } else if (key == "hex_enabled") {
            config.hex_enabled = as_boolean(value, key);
        } else if (key == "hex_rings") {
            config.hex_rings = static_cast<int>(as_integer(value, key));
        } else if (key == "hex_i") {
            config.hex_i = static_cast<int>(as_integer(value, key));
        } else if (key == "hex_j") {
            config.hex_j = static_cast<int>(as_integer(value, key));
        } else if (key == "compare_level") {
            config.compare_level = as_number(value, key);
        } else if (key == "output_path") {
            config.output_path = as_string(value, key);
        } else {
            fail_key(key, "unknown key");
        }
    }
    if (!have_density)
        throw std::invalid_argument("config: missing required key 'density_per_m2'");
    if (!have_noise)
        throw std::invalid_argument(
            "config: missing required key 'noise_dbm' (a number in dBm, or \"off\")");

    validate_config(config);
    return config;
}

std::string emit_config(const ExperimentConfig& config) {
    json j;
    j["density_per_m2"] = config.density_per_m2;
    j["power_dbm"] = config.power_dbm;
    j["pathloss_model"] = config.pathloss_model;
    j["pathloss_k_db"] = config.pathloss_k_db;
    j["pathloss_gamma"] = config.pathloss_gamma;
    j["pathloss_r0_m"] = config.pathloss_r0_m;
    j["shadowing_model"] = config.shadowing_model;
    j["shadowing_sigma_db"] = config.shadowing_sigma_db;
    if (config.noise_off)
        j["noise_dbm"] = "off";
    else
        j["noise_dbm"] = config.noise_dbm;
    j["mu"] = config.mu;
    j["reuse_k"] = config.reuse_k;
    j["beamforming_enabled"] = config.beamforming_enabled;
    j["beamforming_n_t"] = config.beamforming_n_t;
    j["threshold_db"] = config.threshold_db;
    j["slots"] = config.slots;
    j["sweep_name"] = config.sweep_name;
    j["sweep_start"] = config.sweep_start;
    j["sweep_stop"] = config.sweep_stop;
    j["sweep_step"] = config.sweep_step;
    j["region_radius_m"] = config.region_radius_m;
    j["snapshots"] = config.snapshots;
    j["seed"] = config.seed;
    j["workers"] = config.workers;
    j["hex_enabled"] = config.hex_enabled;
    j["hex_rings"] = config.hex_rings;
    j["hex_i"] = config.hex_i;
    j["hex_j"] = config.hex_j;
    j["compare_level"] = config.compare_level;
    j["output_path"] = config.output_path;
    return j.dump();
}

PropagationEnvironment make_environment(const ExperimentConfig& config) {
    PropagationEnvironment env;
    env.lambda_b = config.density_per_m2;
    env.p_tx = dbm_to_mw(config.power_dbm);
    const double k_gain = db_to_linear(config.pathloss_k_db);
    env.pathloss = config.pathloss_model == "modified_exponent"
                       ? PathLossModel::modified(k_gain, config.pathloss_gamma,
                                                 config.pathloss_r0_m)
                       : PathLossModel::exponent(k_gain, config.pathloss_gamma);
    env.shadowing = config.shadowing_model == "lognormal"
                        ? ShadowingModel::lognormal(config.shadowing_sigma_db)
                        : ShadowingModel::none();
    env.noise = config.noise_off ? 0.0 : dbm_to_mw(config.noise_dbm);
    env.mu = config.mu;
    env.reuse_k = config.reuse_k;
    env.beam = config.beamforming_enabled
                   ? BeamPattern::conventional(config.beamforming_n_t)
                   : BeamPattern::omni();
    validate(env);
    return env;
}

SimConfig make_sim(const ExperimentConfig& config) {
    SimConfig sim;
    sim.region_radius = config.region_radius_m;
    sim.n_snapshots = config.snapshots;
    sim.seed = config.seed;
    sim.workers = config.workers;
    validate(sim);
    return sim;
}

std::vector<double> sweep_values(const ExperimentConfig& config) {
    const long count = static_cast<long>(std::floor(
                           (config.sweep_stop - config.sweep_start) / config.sweep_step +
                           1e-9)) +
                       1;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        values.push_back(config.sweep_start + static_cast<double>(i) * config.sweep_step);
    return values;
}

namespace {

// The sweep axis lands on a config copy so every downstream quantity (env,
// threshold, slot count) is derived the same way as in a single-point run.
ExperimentConfig at_sweep_point(const ExperimentConfig& config, double value) {
    ExperimentConfig point = config;
    if (config.sweep_name == "threshold_db")
        point.threshold_db = value;
    else if (config.sweep_name == "gamma")
        point.pathloss_gamma = value;
    else if (config.sweep_name == "reuse_k")
        point.reuse_k = static_cast<int>(std::lround(value));
    else if (config.sweep_name == "slots")
        point.slots = static_cast<int>(std::lround(value));
    else
        throw std::invalid_argument("config key 'sweep_name': unknown axis " +
                                    config.sweep_name);
    return point;
}

ResultRow skeleton_row(const char* model, const ExperimentConfig& point,
                       double sweep_value) {
    ResultRow row;
    row.model = model;
    row.sweep_name = point.sweep_name;
    row.sweep_value = sweep_value;
    row.threshold_db = point.threshold_db;
    row.gamma = point.pathloss_gamma;
    row.reuse_k = point.reuse_k;
    row.slots = point.slots;
    return row;
}

// Smallest canonical shift pair (i >= j >= 0) realizing reuse_k = i^2+ij+j^2,
// if the factor is achievable on the triangular sub-lattice at all.
std::optional<std::pair<int, int>> reuse_shifts(int reuse_k) {
    for (int i = 1; i * i <= reuse_k; ++i)
        for (int j = 0; j <= i; ++j)
            if (i * i + i * j + j * j == reuse_k) return std::make_pair(i, j);
    return std::nullopt;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& config,
                                 const ModelSelection& models) {
    validate_config(config);
    std::vector<ResultRow> rows;
    for (double value : sweep_values(config)) {
        const ExperimentConfig point = at_sweep_point(config, value);
        const double threshold = db_to_linear(point.threshold_db);

        if (models.poisson_analytic) {
            ResultRow row = skeleton_row("poisson_analytic", point, value);
            try {
                const CoverageQuery query{make_environment(point), threshold, point.slots};
                row.p_outage = outage_probability(query);
                row.p_handover =
                    point.slots == 1 ? *row.p_outage : handover_probability(query);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }

        if (models.poisson_mc) {
            ResultRow row = skeleton_row("poisson_mc", point, value);
            try {
                const PropagationEnvironment env = make_environment(point);
                const SimConfig sim = make_sim(point);
                const Estimate outage = estimate_outage(env, sim, threshold);
                const Estimate handover =
                    point.slots == 1 ? outage
                                     : estimate_handover(env, sim, threshold, point.slots);
                row.p_outage = outage.mean;
                row.p_outage_stderr = outage.std_error;
                row.p_handover = handover.mean;
                row.p_handover_stderr = handover.std_error;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }

        if (models.hexagonal_mc && config.hex_enabled) {
            ResultRow row = skeleton_row("hexagonal_mc", point, value);
            try {
                int shift_i = point.hex_i;
                int shift_j = point.hex_j;
                if (config.sweep_name == "reuse_k") {
                    const auto shifts = reuse_shifts(point.reuse_k);
                    if (!shifts)
                        throw std::runtime_error(
                            "no (i, j) shift pair realizes reuse_k = " +
                            std::to_string(point.reuse_k));
                    shift_i = shifts->first;
                    shift_j = shifts->second;
                }
                const PropagationEnvironment env = make_environment(point);
                const SimConfig sim = make_sim(point);
                const HexLayout layout =
                    build_layout(env.lambda_b, point.hex_rings, shift_i, shift_j);
                row.reuse_k = layout.reuse_k;
                const Estimate outage = estimate_hex_outage(layout, env, sim, threshold);
                const Estimate handover =
                    point.slots == 1
                        ? outage
                        : estimate_hex_handover(layout, env, sim, threshold, point.slots);
                row.p_outage = outage.mean;
                row.p_outage_stderr = outage.std_error;
                row.p_handover = handover.mean;
                row.p_handover_stderr = handover.std_error;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string();
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char ch : field) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_optional(const std::string& field, const char* what) {
    if (field.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("results: bad ") + what + " value: " + field);
    }
}

double parse_required(const std::string& field, const char* what) {
    const std::optional<double> value = parse_optional(field, what);
    if (!value) throw std::runtime_error(std::string("results: missing ") + what);
    return *value;
}

}  // namespace

const char* const kResultHeader =
    "model,sweep_name,sweep_value,threshold_db,gamma,reuse_k,slots,"
    "p_outage,p_outage_stderr,p_handover,p_handover_stderr,error";

std::uint64_t config_hash(const ExperimentConfig& config) {
    // Execution knobs that cannot change the numbers are normalized away, so
    // reruns on a different worker count or output path hash identically.
    ExperimentConfig canonical = config;
    canonical.workers = 1;
    canonical.output_path.clear();
    return fnv1a(emit_config(canonical));
}

std::string render_csv(const ExperimentConfig& config,
                       const std::vector<ResultRow>& rows) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    std::ostringstream out;
    out << "# cellcov " << kVersion << "\n";
    out << "# config_hash " << hash << "\n";
    out << "# seed " << config.seed << "\n";
    out << kResultHeader << "\n";
    for (const ResultRow& row : rows) {
        out << csv_quote(row.model) << ',' << csv_quote(row.sweep_name) << ','
            << format_number(row.sweep_value) << ',' << format_number(row.threshold_db)
            << ',' << format_number(row.gamma) << ',' << row.reuse_k << ',' << row.slots
            << ',' << format_optional(row.p_outage) << ','
            << format_optional(row.p_outage_stderr) << ','
            << format_optional(row.p_handover) << ','
            << format_optional(row.p_handover_stderr) << ',' << csv_quote(row.error)
            << '\n';
    }
    return out.str();
}

std::vector<ResultRow> read_result_csv(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kResultHeader)
                throw std::runtime_error("results: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 12)
            throw std::runtime_error("results: expected 12 fields, got " +
                                     std::to_string(fields.size()) + ": " + line);
        ResultRow row;
        row.model = fields[0];
        row.sweep_name = fields[1];
        row.sweep_value = parse_required(fields[2], "sweep_value");
        row.threshold_db = parse_required(fields[3], "threshold_db");
        row.gamma = parse_required(fields[4], "gamma");
        row.reuse_k = static_cast<int>(parse_required(fields[5], "reuse_k"));
        row.slots = static_cast<int>(parse_required(fields[6], "slots"));
        row.p_outage = parse_optional(fields[7], "p_outage");
        row.p_outage_stderr = parse_optional(fields[8], "p_outage_stderr");
        row.p_handover = parse_optional(fields[9], "p_handover");
        row.p_handover_stderr = parse_optional(fields[10], "p_handover_stderr");
        row.error = fields[11];
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw std::runtime_error("results: missing header row");
    return rows;
}

namespace {

double crossing_db(const std::vector<ResultRow>& rows, const std::string& model,
                   double level) {
    std::vector<std::pair<double, double>> curve;
    for (const ResultRow& row : rows) {
        if (row.model != model || !row.error.empty() || !row.p_outage) continue;
        if (row.sweep_name != "threshold_db")
            throw std::runtime_error("compare: needs a threshold_db sweep, got " +
                                     row.sweep_name);
        curve.emplace_back(row.sweep_value, *row.p_outage);
    }
    std::sort(curve.begin(), curve.end());
    if (curve.size() < 2)
        throw std::runtime_error("compare: fewer than two usable " + model +
                                 " sweep points");
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto [x0, y0] = curve[i];
        const auto [x1, y1] = curve[i + 1];
        if ((y0 - level) * (y1 - level) <= 0.0) {
            if (y1 == y0) return x0;
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
        }
    }
    throw std::runtime_error("compare: outage level " + format_number(level) +
                             " not bracketed by the " + model + " sweep");
}

}  // namespace

GapReport compare_models(const std::vector<ResultRow>& rows, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("compare: level must be strictly between 0 and 1");
    bool have_analytic = false;
    for (const ResultRow& row : rows)
        if (row.model == "poisson_analytic" && row.error.empty() && row.p_outage)
            have_analytic = true;
    GapReport report;
    report.level = level;
    report.poisson_model = have_analytic ? "poisson_analytic" : "poisson_mc";
    report.poisson_db = crossing_db(rows, report.poisson_model, level);
    report.hex_db = crossing_db(rows, "hexagonal_mc", level);
    report.gap_db = report.hex_db - report.poisson_db;
    return report;
}

}  // namespace cellcov
