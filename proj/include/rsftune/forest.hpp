#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsftune/dataset.hpp"
#include "rsftune/estimators.hpp"
#include "rsftune/hyperparams.hpp"

namespace rsftune {

/// Flat node storage. Internal nodes route x[feature] <= threshold to `left`;
/// terminal nodes point at a row of SurvivalTree::leaf_chf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf = -1;
  std::int32_t n_samples = 0;

  bool is_terminal() const { return feature < 0; }
};

struct SurvivalTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  /// Terminal cumulative hazards, tabulated on the forest's time grid.
  std::vector<std::vector<double>> leaf_chf;

  const TreeNode& route(std::span<const double> x) const;
  int depth() const;
  std::size_t leaf_count() const { return leaf_chf.size(); }
};

struct SurvivalForest {
  std::vector<SurvivalTree> trees;
  /// Distinct training event times, ascending.
  std::vector<double> time_grid;
  HyperParams params;
  std::uint64_t seed = 0;
  std::size_t feature_dim = 0;

  /// The terminal curve of `tree` reached by x, as a ChfCurve.
  ChfCurve terminal_curve(std::size_t tree, std::span<const double> x) const;
};

/// Grows params.ntree bootstrap survival trees. Tree t draws all of its
/// randomness from derive_seed({seed, t}), so the forest is a pure function of
/// (ds, params, seed) for any `workers`.
SurvivalForest fit(const SurvivalDataset& ds, const HyperParams& params, std::uint64_t seed, int workers = 1);

/// Ensemble cumulative hazard: pointwise mean of the terminal curves.
ChfCurve predict_chf(const SurvivalForest& forest, std::span<const double> x);

/// Mortality: ensemble CHF summed over the time grid.
double predict_risk(const SurvivalForest& forest, std::span<const double> x);
double mortality(const ChfCurve& chf);

/// exp(-H(t)) for the ensemble CHF.
double predict_survival(const SurvivalForest& forest, std::span<const double> x, double t);

}  // namespace rsftune
