#pragma once

#include "fracflow/core.hpp"
#include "fracflow/solvers.hpp"
#include "fracflow/stochastic.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracflow {

// TOML text to JSON. Dates and times are rejected.
nlohmann::json parse_toml(const std::string& text, const std::string& source = "config");
// A .json path is taken to be an output sidecar and its "config" member is returned;
// anything else is parsed as TOML. Throws ConfigError.
nlohmann::json load_config(const std::string& path);

// Every parse_* function rejects unknown sections and keys and checks parameter ranges,
// throwing ConfigError. `normalized` holds the config with defaults filled in.

struct InitialCondition {
    std::string kind = "delta";  // delta | gaussian | file
    std::string path;
    double sigma = 1.0;
    Vec center;
};

struct SolveConfig {
    Grid grid = Grid::cube(1, 8, 1.0);
    SolveSpec spec;
    InitialCondition initial;
    nlohmann::json normalized;
};
SolveConfig parse_solve_config(const nlohmann::json& cfg);
ScalarField build_initial(const SolveConfig& cfg);

struct SampleConfig {
    ProcessDescriptor desc;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    nlohmann::json normalized;
};
SampleConfig parse_sample_config(const nlohmann::json& cfg, std::optional<std::uint64_t> seed_override = {});

struct OpConfig {
    // fractional-gradient | fractional-divergence | directional-operator | riesz |
    // directional-second-power | fractional-shift
    std::string name;
    std::string input;
    std::optional<Frame> frame;
    double beta = 1.0;
    double alpha = 1.0;
    double order = 2.0;
    double shift = 1.0;
    Vec theta;
    nlohmann::json normalized;
};
OpConfig parse_op_config(const nlohmann::json& cfg);

struct ValidateConfig {
    std::vector<std::string> cases;
    bool all = false;
    std::optional<std::uint64_t> seed;
};
ValidateConfig parse_validate_config(const nlohmann::json& cfg);

}  // namespace fracflow
