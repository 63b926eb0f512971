#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rsftune/forest.hpp"

namespace rsftune {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json params_to_json(const HyperParams& params);
HyperParams params_from_json(const nlohmann::json& j);

/// {format_version, params, seed, feature_dim, time_grid, trees}; each tree is
/// a nested node object: internal {feature, threshold, left, right}, terminal
/// {n_samples, chf}.
nlohmann::json forest_to_json(const SurvivalForest& forest);
SurvivalForest forest_from_json(const nlohmann::json& j);

void save_forest(const std::filesystem::path& path, const SurvivalForest& forest);
SurvivalForest load_forest(const std::filesystem::path& path);

}  // namespace rsftune
