#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rsftune/hyperparams.hpp"
#include "rsftune/tuner.hpp"

namespace rsftune {

/// Both views are risks (lower is better): 1 - C-index, or integrated Brier.
enum class RiskMetric { CIndex, Brier };

std::string_view to_string(RiskMetric m);  // "cindex" / "brier"
RiskMetric parse_risk_metric(std::string_view s);

double risk(const EvalOutcome& outcome, RiskMetric metric);

/// Lowest-risk outcome of the table; the lowest config_id wins ties.
const EvalOutcome& best_outcome(const ResultsTable& table, RiskMetric metric);

/// R(reference) - min R over every evaluated configuration.
double model_tunability(const ResultsTable& table, RiskMetric metric);

/// One point of a one-dimensional slice through the reference configuration.
struct SliceEntry {
  double ordinal = 0.0;
  std::string value;  // CSV label; split rules use their numeric code
  HyperParams params;
  double risk = 0.0;
};

/// The reference with hyperparameter h set to each of its grid values, in grid
/// list order. The reference itself belongs to the slice only when its own
/// value of h is in the list. Throws when a slice configuration was not
/// evaluated.
std::vector<SliceEntry> slice(const ResultsTable& table, Hyperparam h, RiskMetric metric);

/// Slice argmin; ties go to the value closest to the reference value, then to
/// the lower value.
HyperParams best_config_single_hyperparam(const ResultsTable& table, Hyperparam h, RiskMetric metric);

/// R(reference) - R(best slice configuration). Negative only when the
/// reference value of h is not among the grid values.
double hyperparam_tunability(const ResultsTable& table, Hyperparam h, RiskMetric metric);

/// d_i / d, or nullopt when d = 0.
std::optional<double> relative_tunability(const ResultsTable& table, Hyperparam h, RiskMetric metric);

struct RangeEntry {
  double ordinal = 0.0;
  std::string value;
  double d = 0.0;
};

/// R(reference) - R(slice value) for every grid value of h, in ascending value
/// order.
std::vector<RangeEntry> range_map(const ResultsTable& table, Hyperparam h, RiskMetric metric);

enum class AggregateStat { Mean, Median, Min, Max, Quantile };

/// Statistic over per-dataset values. Quantiles use linear interpolation; q is
/// only read for AggregateStat::Quantile.
double aggregate(const std::map<std::string, double>& values, AggregateStat stat, double q = 0.5);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::map<std::string, double>& values);

struct DatasetTunability {
  std::string dataset_id;
  double default_risk = 0.0;
  double best_risk = 0.0;
  double d = 0.0;
  std::size_t best_config_id = 0;
  HyperParams best_params;
  std::map<Hyperparam, double> d_i;
  std::map<Hyperparam, std::optional<double>> d_rel;
  std::map<Hyperparam, HyperParams> best_single;
  std::map<Hyperparam, std::vector<RangeEntry>> ranges;
};

struct TunabilityReport {
  RiskMetric metric = RiskMetric::CIndex;
  std::vector<DatasetTunability> datasets;  // input order

  Summary default_risk_summary;
  Summary best_risk_summary;
  Summary d_summary;
  std::map<Hyperparam, Summary> d_i_summary;
  /// Over the datasets with a defined relative value; absent when none has one.
  std::map<Hyperparam, std::optional<Summary>> d_rel_summary;
};

/// Pure function of the tables; dataset ids must be distinct.
TunabilityReport build_report(std::span<const ResultsTable> tables, RiskMetric metric);

nlohmann::json report_to_json(const TunabilityReport& report);

// Plot-ready CSV exports. Each writer emits its header, the per-dataset rows
// of every report, then "mean", "median", "min" and "max" rows computed
// column by column across datasets.
void write_model_csv(std::ostream& out, std::span<const TunabilityReport> reports);
void write_hyperparam_csv(std::ostream& out, std::span<const TunabilityReport> reports);
void write_range_csv(std::ostream& out, std::span<const TunabilityReport> reports);

}  // namespace rsftune
