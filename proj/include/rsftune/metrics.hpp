#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rsftune/dataset.hpp"

namespace rsftune {

/// Right-continuous step function: value at t is the value of the largest
/// step time <= t, or left_value before the first step.
struct StepFunction {
  std::vector<double> times;
  std::vector<double> values;
  double left_value = 1.0;

  double at(double t) const;
  /// Left limit f(t-): the value of the largest step time strictly below t.
  double left_limit(double t) const;
};

struct MetricPair {
  double cindex = 0.0;
  double brier = 0.0;
};

/// Harrell's C. Comparable pairs have T_i < T_j with delta_i = 1; concordant
/// when risk_i > risk_j, half credit for tied risks. Throws when no pair is
/// comparable.
double concordance_index(std::span<const double> risks, std::span<const double> times,
                         std::span<const int> events);

/// Kaplan-Meier estimate of the censoring survival G(t). Censorings play the
/// role of events; at tied times failures leave the risk set first.
StepFunction km_censoring(std::span<const double> times, std::span<const int> events);

/// IPCW Brier score at time t. Terms whose weight would divide by G = 0 are
/// dropped and the divisor reduced accordingly.
double brier_at(std::span<const double> surv_probs, std::span<const double> times, std::span<const int> events,
                double t, const StepFunction& censoring);

/// Survival probability of record i of the evaluation set at time t.
using SurvivalProvider = std::function<double(std::size_t record, double t)>;

/// Trapezoidal average of brier_at over t_grid, normalised by its span.
double integrated_brier(const SurvivalProvider& predict, const SurvivalDataset& eval_set,
                        const StepFunction& censoring, std::span<const double> t_grid);

/// `points` equally spaced times between the 5th and 95th percentiles
/// (linear interpolation) of `times`.
std::vector<double> default_brier_grid(std::span<const double> times, std::size_t points = 100);

/// Linear-interpolation sample quantile (the usual "type 7" definition).
double quantile_linear(std::vector<double> values, double q);

}  // namespace rsftune
