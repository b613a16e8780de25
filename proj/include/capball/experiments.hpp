#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capball/sets.hpp"

namespace capball {

inline constexpr const char* kVersion = "0.1.0";

/// Shared configuration bag; each experiment reads the fields it needs.
/// Every field has a default, and reports echo the resolved values.
struct ExperimentConfig {
  std::string id;
  int d = 1;
  double s = 0.5;
  std::vector<double> a_values;
  std::vector<SetSpec> battery;
  std::vector<int> meshes;
  std::string flavor = "da";
  int mesh = 64;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  int samples = 50;
  double window = 50.0;
  int truncation = 512;
};

/// Shipped defaults per experiment id:
///   comparability, capacity-battery, extremal-audit, pick-regularity,
///   multiplier, identities, anchor, oracle.
/// Unknown ids raise ConfigError. d and s apply where the experiment takes them.
ExperimentConfig default_config(const std::string& id, int d = 1, double s = 0.5);
std::vector<std::string> experiment_ids();

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing fields take the defaults of the named experiment.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// 16 hex digits of FNV-1a over the compact JSON of the config.
std::string config_digest(const ExperimentConfig& c);

struct Report {
  nlohmann::json json;  // always has experiment, version, configDigest, config, passed
  std::string csv;      // companion table, header first
  bool passed = false;
};

Report run_comparability(const ExperimentConfig& c);
Report run_capacity_battery(const ExperimentConfig& c);
Report run_extremal_audit(const ExperimentConfig& c);
Report run_pick_and_regularity(const ExperimentConfig& c);
Report run_multiplier_suite(const ExperimentConfig& c);
Report run_identity_suite(const ExperimentConfig& c);
Report run_circle_anchor(const ExperimentConfig& c);
Report run_oracle_equivalence(const ExperimentConfig& c);

/// Dispatch on c.id.
Report run_experiment(const ExperimentConfig& c);

/// Formats a double with 17 significant digits.
std::string fmt17(double x);

}  // namespace capball
