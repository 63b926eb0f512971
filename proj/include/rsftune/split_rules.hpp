#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsftune/hyperparams.hpp"

namespace rsftune {

/// Times and event flags of one side of a candidate split.
struct GroupSample {
  std::span<const double> times;
  std::span<const int> events;
};

/// Standardised absolute two-sample log-rank statistic |O_L - E_L| / sqrt(V)
/// over the pooled distinct event times. Returns 0 when V = 0.
double logrank_statistic(GroupSample left, GroupSample right);

/// Standardised absolute log-rank score statistic. Scores are
/// a_i = delta_i - H(T_i), with H the pooled Nelson-Aalen estimate (tied times
/// share the lowest rank). Returns 0 when the scores have no variance.
double logrankscore_statistic(GroupSample left, GroupSample right);

/// Brier-impurity reduction averaged over `pooled_grid`. The impurity of a
/// group at t is the mean of (1{T > t} - S_g(t))^2 with S_g the group's
/// Kaplan-Meier curve. Returns 0 for an empty grid.
double bs_gradient_statistic(GroupSample left, GroupSample right, std::span<const double> pooled_grid);

/// Distinct values among the 10%, 20%, ..., 90% empirical quantiles of the
/// event times (censored times excluded). Empty when there are no events.
std::vector<double> event_time_deciles(std::span<const double> times, std::span<const int> events);

/// Scores many candidate partitions of one node. Construction does the per-node
/// work (time grouping, log-rank scores, parent impurity), after which each
/// call to score() is linear in the node size.
class NodeSplitScorer {
 public:
  /// `times` must be sorted ascending; `events` is aligned with it. For
  /// BsGradient the grid defaults to event_time_deciles of the node.
  NodeSplitScorer(SplitRule rule, std::span<const double> times, std::span<const int> events);
  NodeSplitScorer(SplitRule rule, std::span<const double> times, std::span<const int> events,
                  std::span<const double> bs_grid);

  /// `goes_left[i]` is nonzero when sample i (in time order) is in the left
  /// child. Larger is better.
  double score(std::span<const std::uint8_t> goes_left) const;

  std::size_t size() const { return n_; }

 private:
  double logrank(std::span<const std::uint8_t> goes_left) const;
  double logrank_score(std::span<const std::uint8_t> goes_left) const;
  double brier_gain(std::span<const std::uint8_t> goes_left) const;

  SplitRule rule_;
  std::size_t n_ = 0;
  std::span<const int> events_;
  std::vector<std::size_t> group_end_;  // exclusive end of each equal-time run
  std::vector<int> group_deaths_;
  // Log-rank score statistic.
  std::vector<double> scores_;
  double score_mean_ = 0.0;
  double score_var_ = 0.0;
  // Brier gradient: number of time groups at or before each grid time, and the
  // parent impurity there.
  std::vector<std::size_t> grid_groups_;
  std::vector<double> parent_impurity_;
};

}  // namespace rsftune
