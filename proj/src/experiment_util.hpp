#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "capball/experiments.hpp"
#include "capball/numerics.hpp"

namespace capball::detail {

/// Report with experiment, version, configDigest and config filled in.
Report start_report(const ExperimentConfig& c, const char* name);
/// Stores the named boolean checks; passed is their conjunction.
void finish_report(Report& r, const nlohmann::json& checks);

/// Flat Dirichlet draw on the simplex; `sparse` zeroes about 70% of entries.
std::vector<double> dirichlet_weights(numerics::CounterRng& rng, std::size_t n, bool sparse);

}  // namespace capball::detail
