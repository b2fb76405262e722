#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace windlab::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string experiment;
    struct Domain {
        std::string shape = "disc";  // "disc" or "square"
        double outer_radius = 10.0;
        double inner_radius = 0.0;
    } domain;
    struct Marked {
        std::vector<double> inner_angles;
        std::vector<double> outer_angles;
    } marked;
    struct Run {
        std::uint64_t seed = 1;
        std::uint64_t samples = 1000;
        double dt = 1e-3;
        double t_end = 1.0;
        double beta = 0.0;
        double kappa = 2.0;
        int n = 1;
        double tolerance = 1e-8;
    } run;
    struct Output {
        std::string path;
        std::string format = "csv";
    } output;
};

const std::vector<std::string>& experiment_names();

// Defaults for an experiment, overridden by a config document.  Unknown keys
// and invalid values raise ConfigError.
Config default_config(const std::string& experiment);
Config parse_config(const json& doc, const std::string& experiment);
void validate_config(const Config& config);
json config_to_json(const Config& config);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ExperimentResult {
    Table table;
    json summary;
    bool ok = true;
    std::string failure;
};

ExperimentResult run_experiment(const Config& config);

std::string table_to_csv(const Table& table);
json table_to_json(const Table& table);

// FNV-1a of the canonical config dump, as 16 hex digits.
std::string config_hash(const Config& config);

} // namespace windlab::cli
