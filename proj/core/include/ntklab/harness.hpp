#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ntklab {

// One experiment = one config + one root seed + one output directory.
// Precedence: CLI overrides > config file > subcommand defaults.
struct ExperimentConfig {
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  static ExperimentConfig from_file(const std::string& path,
                                    const std::vector<std::string>& overrides);
  void apply_override(const std::string& key_value);  // "key=value"
};

struct RunReport {
  std::string subcommand;
  std::map<std::string, double> metrics;
  std::optional<bool> pass;  // unset for neutral / not-applicable runs
  std::vector<std::string> artifacts;

  nlohmann::json to_json() const;
};

// End-to-end benign-overfitting classification run: mixture data, logistic
// SGD, train/test errors, margin and Lipschitz estimates, bound value.
RunReport cmd_benign_class(const ExperimentConfig& cfg);

// Minimum-eigenvalue bound sweep over an (n, d, L) grid plus the trend-table
// segment check.
RunReport cmd_min_eig_sweep(const ExperimentConfig& cfg);

// Empirical-vs-limiting NTK deviation across widths.
RunReport cmd_ntk_converge(const ExperimentConfig& cfg);

// Class-pair mean kernel values (synthetic mixture or IDX image data).
RunReport cmd_assumption_check(const ExperimentConfig& cfg);

// Ridgeless kernel-regression excess risk across an n-grid.
RunReport cmd_excess_risk_sweep(const ExperimentConfig& cfg);

}  // namespace ntklab
