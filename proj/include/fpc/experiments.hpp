#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpc/report.hpp"
#include "json.hpp"

namespace fpc {

struct ExperimentConfig {
    std::string experiment;
    std::optional<std::uint64_t> seed;
    Format format = Format::csv;
    std::string out;    // empty: stdout
    std::string table;  // auxiliary CSV (boxcount levels, sample-dump items)
    int threads = 0;
    nlohmann::json parameters = nlohmann::json::object();
};

const std::vector<std::string>& experiment_names();

// Reads a JSON config file.  Unknown top-level keys are rejected.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Checks the experiment name, the seed and every parameter, and fills defaults.
// Throws std::invalid_argument with a readable message.
void validate(ExperimentConfig& cfg);

// Runs a validated config.  Writes the auxiliary table if requested; the report
// itself is returned, not written.
ExperimentReport run(const ExperimentConfig& cfg);

}  // namespace fpc
