#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsftune/hyperparams.hpp"

namespace rsftune {

/// Reference configuration as written in a grid file. mtry may be left as
/// "auto", which resolves to floor(sqrt(p)) once the feature count is known.
struct ReferenceConfig {
  int ntree = 500;
  std::optional<int> mtry;
  int nodesize = 15;
  NodeDepth nodedepth = NodeDepth::unlimited();
  SplitRule splitrule = SplitRule::LogRank;
  int nsplit = 10;

  HyperParams resolve(std::size_t feature_dim) const;

  friend bool operator==(const ReferenceConfig&, const ReferenceConfig&) = default;
};

struct GridSpec {
  std::vector<int> ntree_values;
  std::vector<int> mtry_values;
  std::vector<int> nodesize_values;
  std::vector<NodeDepth> nodedepth_values;
  std::vector<SplitRule> splitrule_values;
  std::vector<int> nsplit_values;
  ReferenceConfig defaults;

  /// Non-empty, duplicate-free, in-range value lists. Throws
  /// std::invalid_argument naming the offending field.
  void validate() const;

  /// Size of the Cartesian product.
  std::size_t size() const;
  std::size_t value_count(Hyperparam h) const;
  /// Grid values of one hyperparameter as ordinals, in list order.
  std::vector<double> ordinals(Hyperparam h) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Configuration with lexicographic rank `config_id` over list positions of
/// (ntree, mtry, nodesize, nodedepth, splitrule, nsplit); nsplit varies fastest.
HyperParams config_at(const GridSpec& spec, std::size_t config_id);

/// The full product in config_id order.
std::vector<HyperParams> enumerate_grid(const GridSpec& spec);

/// Rank of `params` in the product, or nullopt when any value is off-grid.
std::optional<std::size_t> config_index(const GridSpec& spec, const HyperParams& params);

// Grid files are line-oriented "key = v1, v2, ..." text with '#' comments.
// Keys: ntree_values, mtry_values, nodesize_values, nodedepth_values,
// splitrule_values, nsplit_values, and optional defaults.<name> entries.
GridSpec parse_grid_file(std::istream& in, const std::string& source_name = "<grid>");
GridSpec load_grid_file(const std::filesystem::path& path);
std::string format_grid_file(const GridSpec& spec);

nlohmann::json grid_to_json(const GridSpec& spec);
GridSpec grid_from_json(const nlohmann::json& j);

}  // namespace rsftune
