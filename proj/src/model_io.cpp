#include "rsftune/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace rsftune {

using nlohmann::json;

json params_to_json(const HyperParams& p) {
  json j;
  j["ntree"] = p.ntree;
  j["mtry"] = p.mtry;
  j["nodesize"] = p.nodesize;
  j["nodedepth"] = p.nodedepth.to_string();
  j["splitrule"] = std::string(to_string(p.splitrule));
  j["nsplit"] = p.nsplit;
  return j;
}

HyperParams params_from_json(const json& j) {
  HyperParams p;
  p.ntree = j.at("ntree").get<int>();
  p.mtry = j.at("mtry").get<int>();
  p.nodesize = j.at("nodesize").get<int>();
  const auto& depth = j.at("nodedepth");
  p.nodedepth = depth.is_string() ? NodeDepth::parse(depth.get<std::string>())
                                  : NodeDepth::limited(depth.get<int>());
  p.splitrule = parse_split_rule(j.at("splitrule").get<std::string>());
  p.nsplit = j.at("nsplit").get<int>();
  p.validate();
  return p;
}

namespace {

json node_to_json(const SurvivalTree& tree, std::size_t index) {
  const TreeNode& node = tree.nodes[index];
  json j;
  if (node.is_terminal()) {
    j["n_samples"] = node.n_samples;
    j["chf"] = tree.leaf_chf[static_cast<std::size_t>(node.leaf)];
  } else {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["left"] = node_to_json(tree, static_cast<std::size_t>(node.left));
    j["right"] = node_to_json(tree, static_cast<std::size_t>(node.right));
  }
  return j;
}

std::int32_t node_from_json(const json& j, SurvivalTree& tree, std::size_t feature_dim, std::size_t grid_size) {
  const auto index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("chf")) {
    auto chf = j.at("chf").get<std::vector<double>>();
    if (chf.size() != grid_size) throw std::runtime_error("model: terminal curve length does not match time grid");
    tree.nodes[index].n_samples = j.at("n_samples").get<std::int32_t>();
    tree.nodes[index].leaf = static_cast<std::int32_t>(tree.leaf_chf.size());
    tree.leaf_chf.push_back(std::move(chf));
    return index;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= feature_dim) {
    throw std::runtime_error("model: split feature index out of range");
  }
  tree.nodes[index].feature = feature;
  tree.nodes[index].threshold = j.at("threshold").get<double>();
  const std::int32_t l = node_from_json(j.at("left"), tree, feature_dim, grid_size);
  const std::int32_t r = node_from_json(j.at("right"), tree, feature_dim, grid_size);
  tree.nodes[index].left = l;
  tree.nodes[index].right = r;
  return index;
}

}  // namespace

json forest_to_json(const SurvivalForest& forest) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["params"] = params_to_json(forest.params);
  j["seed"] = forest.seed;
  j["feature_dim"] = forest.feature_dim;
  j["time_grid"] = forest.time_grid;
  json trees = json::array();
  for (const auto& tree : forest.trees) trees.push_back(node_to_json(tree, 0));
  j["trees"] = std::move(trees);
  return j;
}

SurvivalForest forest_from_json(const json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw std::runtime_error("model format version " + std::to_string(version) + " is not supported (expected " +
                             std::to_string(kModelFormatVersion) + ")");
  }
  SurvivalForest forest;
  forest.params = params_from_json(j.at("params"));
  forest.seed = j.at("seed").get<std::uint64_t>();
  forest.feature_dim = j.at("feature_dim").get<std::size_t>();
  forest.time_grid = j.at("time_grid").get<std::vector<double>>();
  for (const auto& t : j.at("trees")) {
    SurvivalTree tree;
    node_from_json(t, tree, forest.feature_dim, forest.time_grid.size());
    forest.trees.push_back(std::move(tree));
  }
  if (forest.trees.size() != static_cast<std::size_t>(forest.params.ntree)) {
    throw std::runtime_error("model: tree count does not match ntree");
  }
  return forest;
}

void save_forest(const std::filesystem::path& path, const SurvivalForest& forest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model '" + path.string() + "'");
  out << forest_to_json(forest).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing model '" + path.string() + "'");
}

SurvivalForest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("model '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return forest_from_json(j);
}

}  // namespace rsftune
