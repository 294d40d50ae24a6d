#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "fermion/sampler.hpp"

namespace fermion::serialization {

/// "value,config_id" header, then one row per point.
std::string configurations_to_csv(const std::vector<sampler::PointConfiguration>& configs);

/// {region: [[a, b], ...], seed: {root, stream}, points: [...]}.
nlohmann::json configuration_to_json(const sampler::PointConfiguration& config);
sampler::PointConfiguration configuration_from_json(const nlohmann::json& j);

nlohmann::json configurations_to_json(const std::vector<sampler::PointConfiguration>& configs);
std::vector<sampler::PointConfiguration> configurations_from_json(const nlohmann::json& j);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace fermion::serialization
