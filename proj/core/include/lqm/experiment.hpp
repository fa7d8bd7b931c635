#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqm/errors.hpp"

namespace lqm {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"measure", "decohere", "nosignal",
                                                "epr",     "entangle", "limits"};
    return names;
}

/// Parsed experiment configuration. `params` echoes the full config object.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output_dir = "out";
    int threads = 1;
};

/// Parse and validate a config object. `expected_experiment` (from the CLI
/// subcommand) fills a missing "experiment" key and must match a present one.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& expected_experiment = "");

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const std::string& expected_experiment = "");

/// One finished experiment: a per-sweep-point table plus scalar metrics.
struct ExperimentRecord {
    std::string experiment;
    nlohmann::json config_echo;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json metrics = nlohmann::json::object();
    double wall_seconds = 0.0;
    std::string version;
};

/// Run the configured experiment. Deterministic given config and seed.
ExperimentRecord run_experiment(const ExperimentConfig& config);

/// Write results.csv and summary.json into out_dir (created if needed).
void emit_record(const ExperimentRecord& record, const std::filesystem::path& out_dir);

/// Shortest lossless decimal form, capped at 17 significant digits;
/// locale-independent.
std::string format_double(double x);

} // namespace lqm
