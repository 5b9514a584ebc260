#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "reachsafe/harness.hpp"

namespace reachsafe {

// Read a JSON config file and apply dotted-key overrides of the form
// "grid.points=[81,81]"; override values parse as JSON when possible and fall
// back to strings.
nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides);
void apply_override(nlohmann::json& j, const std::string& assignment);

// Hash of the canonical (sorted-key) dump; recorded into every artifact.
std::string config_hash(const nlohmann::json& j);

AffinePairwiseDynamics dynamics_from_config(const nlohmann::json& j);
BoundaryFn boundary_from_config(const nlohmann::json& j);
ControlBox box_from_config(const nlohmann::json& j);
// Heading dims whose span is one full period default to periodic.
Grid grid_from_config(const nlohmann::json& j, const AffinePairwiseDynamics& dyn);

// Subcommand bodies. Each validates its config, writes artifacts plus a
// manifest.json into output_dir, and throws ConfigError / NumericalError for
// the CLI to map to exit codes 2 / 3.
void run_gen_demos(const nlohmann::json& cfg);
void run_learn(const nlohmann::json& cfg);
void run_solve(const nlohmann::json& cfg);
void run_compare(const nlohmann::json& cfg);
void run_eval(const nlohmann::json& cfg);

}  // namespace reachsafe
