#include "fermion/serialization.hpp"

#include <charconv>
#include <sstream>

#include "fermion/error.hpp"

namespace fermion::serialization {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string configurations_to_csv(const std::vector<sampler::PointConfiguration>& configs) {
  std::ostringstream out;
  out << "value,config_id\n";
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (double x : configs[i].points) out << format_double(x) << ',' << i << '\n';
  return out.str();
}

nlohmann::json configuration_to_json(const sampler::PointConfiguration& config) {
  nlohmann::json region = nlohmann::json::array();
  for (const auto& iv : config.region.intervals) region.push_back({iv.a, iv.b});
  return {{"region", region},
          {"seed", {{"root", config.seed.root}, {"stream", config.seed.stream}}},
          {"points", config.points}};
}

sampler::PointConfiguration configuration_from_json(const nlohmann::json& j) {
  try {
    sampler::PointConfiguration config;
    std::vector<operators::Interval> intervals;
    for (const auto& iv : j.at("region")) intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    config.region = operators::Region::from_intervals(std::move(intervals));
    config.seed.root = j.at("seed").at("root").get<std::uint64_t>();
    config.seed.stream = j.at("seed").at("stream").get<std::uint64_t>();
    config.points = j.at("points").get<std::vector<double>>();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("configuration_from_json: ") + e.what());
  }
}

nlohmann::json configurations_to_json(const std::vector<sampler::PointConfiguration>& configs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : configs) arr.push_back(configuration_to_json(c));
  return arr;
}

std::vector<sampler::PointConfiguration> configurations_from_json(const nlohmann::json& j) {
  std::vector<sampler::PointConfiguration> out;
  for (const auto& c : j) out.push_back(configuration_from_json(c));
  return out;
}

}  // namespace fermion::serialization
