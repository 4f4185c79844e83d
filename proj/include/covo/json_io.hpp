#pragma once

#include <string>

#include "json.hpp"

#include "covo/models.hpp"
#include "covo/polytope.hpp"

namespace covo {

using Json = nlohmann::json;

// Window <-> {"n": .., "boxes": [{"lo": [..], "hi": [..]}, ..]}; a single box
// may also be written inline as {"n":.., "lo":[..], "hi":[..]}.
Json window_to_json(const Window& w);
Window window_from_json(const Json& j);

// Functional <-> {"c": .., "n": .., "d": .., "terms": [{"a":..,"y":[..],"W":{..}}]}.
// Shifts are written as reals and must land on the 1/n grid when read back.
Json functional_to_json(const Functional& g);
Functional functional_from_json(const Json& j);

Json realisability_report_to_json(const RealisabilityReport& rep,
                                  const S2Curve& s2);

struct ModelConfig {
  std::string type;  // "boolean1d" | "boolean2d"
  BooleanModel1D model1d;
  BooleanModel2D model2d;
  std::uint32_t replicates = 1000;
  double step = 0.1;           // estimate lattice step (1-D)
  std::int32_t max_index = 20; // estimate shifts: -max..max times step
};
ModelConfig model_config_from_json(const Json& j);
Json model_config_to_json(const ModelConfig& cfg);

/// Deterministic run manifest (no timestamps: re-runs must be byte-identical).
Json make_manifest(const std::string& command, const Json& options);

std::string dump_json(const Json& j);
Json parse_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace covo
