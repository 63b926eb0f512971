#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsftune/dataset.hpp"
#include "rsftune/grid.hpp"
#include "rsftune/hyperparams.hpp"
#include "rsftune/metrics.hpp"

namespace rsftune {

/// Cross-validated scores of one configuration on one dataset.
struct EvalOutcome {
  std::string dataset_id;
  std::size_t config_id = 0;
  HyperParams params;
  std::vector<MetricPair> per_fold;
  double mean_cindex = 0.0;
  double mean_brier = 0.0;
  std::uint64_t seed = 0;

  /// Recomputes the means from per_fold.
  void update_means();
};

struct PlannedConfig {
  std::size_t config_id = 0;
  HyperParams params;
};

/// Evaluation order for a grid run: the product in config_id order; then the
/// reference configuration (id = product size) when it is not in the product;
/// then, in that case only, the reference's one-dimensional slice neighbours
/// that the product lacks, ordered by hyperparameter and list position.
std::vector<PlannedConfig> plan_configs(const GridSpec& spec, const HyperParams& reference);

struct ResultsTable {
  std::string dataset_id;
  GridSpec grid;
  HyperParams reference;  // resolved defaults
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<EvalOutcome> outcomes;

  const EvalOutcome* find(const HyperParams& params) const;
  /// Throws when the reference configuration was not evaluated.
  const EvalOutcome& reference_outcome() const;
};

/// Fits on every fold's complement with seed derive_seed({seed, config_id,
/// fold}) and scores the held-out fold (Harrell's C on mortality, integrated
/// IPCW Brier with the censoring curve from the training part).
EvalOutcome evaluate_config(const SurvivalDataset& ds, const HyperParams& params, const FoldAssignment& folds,
                            std::uint64_t seed, std::size_t config_id);

struct GridRunOptions {
  int k = 5;
  std::uint64_t seed = 42;
  int workers = 1;
  /// Outcomes from an interrupted run; their configurations are not re-run.
  std::vector<EvalOutcome> completed;
  /// Receives newly evaluated outcomes, strictly in plan order.
  std::function<void(const EvalOutcome&)> on_outcome;
};

/// Evaluates every planned configuration on one shared fold assignment. The
/// table is identical for any number of workers and for resumed runs.
ResultsTable run_grid(const SurvivalDataset& ds, const GridSpec& spec, const GridRunOptions& options);

}  // namespace rsftune
