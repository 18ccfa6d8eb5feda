#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsde/market_models.hpp"
#include "bsde/picard_engine.hpp"

namespace bsde {

// Fully-resolved run description; all owning-module invariants re-validated
// at load time.
struct RunConfig {
    ModelSpec model;
    Payoff payoff;
    SolverParams solver;
    long benchmark_samples = 1000000;
    int benchmark_euler_steps = 200;
    std::string output_dir = "out";
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses and validates a configuration document; throws ConfigError carrying
/// every violation (unknown keys, type mismatches, violated invariants), each
/// named with its config path.
RunConfig parse_config_json(const nlohmann::json& doc);

/// File front-end for parse_config_json.
RunConfig parse_config(const std::string& path);

/// Worker count resolution: explicit CLI value, then the BSDE_WORKERS
/// environment variable, then the config value, then the hardware count.
int resolve_workers(int cli_value, const RunConfig& config);

/// Self-describing echo of a run: the input parameters plus derived
/// quantities (basis size p, the spatial box D, the path sampling scheme).
nlohmann::json resolved_config_json(const RunConfig& config, const PicardSolver& solver);

} // namespace bsde
