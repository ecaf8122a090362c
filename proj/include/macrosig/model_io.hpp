#pragma once

#include <json.hpp>
#include <string>

#include "macrosig/models.hpp"

namespace macrosig::models {

using Json = nlohmann::ordered_json;

// "macrosig-model/1" schema: family, feature names, standardization
// constants and the family-specific fit payload. The custom test-hook
// family does not serialize.
Json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

Json tree_to_json(const trees::Tree& tree);
trees::Tree tree_from_json(const Json& j);

}  // namespace macrosig::models
