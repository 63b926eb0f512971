#include "rsftune/split_rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsftune {

namespace {

struct PooledNode {
  std::vector<double> times;
  std::vector<int> events;
  std::vector<std::uint8_t> goes_left;
};

PooledNode pool(GroupSample left, GroupSample right) {
  if (left.times.size() != left.events.size() || right.times.size() != right.events.size()) {
    throw std::invalid_argument("split statistic: times/events length mismatch");
  }
  if (left.times.empty() || right.times.empty()) {
    throw std::invalid_argument("split statistic: both groups must be non-empty");
  }
  const std::size_t n = left.times.size() + right.times.size();
  std::vector<double> t;
  std::vector<int> e;
  std::vector<std::uint8_t> side;
  t.reserve(n);
  e.reserve(n);
  side.reserve(n);
  for (std::size_t i = 0; i < left.times.size(); ++i) {
    t.push_back(left.times[i]);
    e.push_back(left.events[i]);
    side.push_back(1);
  }
  for (std::size_t i = 0; i < right.times.size(); ++i) {
    t.push_back(right.times[i]);
    e.push_back(right.events[i]);
    side.push_back(0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });

  PooledNode node;
  node.times.reserve(n);
  node.events.reserve(n);
  node.goes_left.reserve(n);
  for (std::size_t i : order) {
    node.times.push_back(t[i]);
    node.events.push_back(e[i]);
    node.goes_left.push_back(side[i]);
  }
  return node;
}

}  // namespace

double logrank_statistic(GroupSample left, GroupSample right) {
  const PooledNode node = pool(left, right);
  return NodeSplitScorer(SplitRule::LogRank, node.times, node.events).score(node.goes_left);
}

double logrankscore_statistic(GroupSample left, GroupSample right) {
  const PooledNode node = pool(left, right);
  return NodeSplitScorer(SplitRule::LogRankScore, node.times, node.events).score(node.goes_left);
}

double bs_gradient_statistic(GroupSample left, GroupSample right, std::span<const double> pooled_grid) {
  const PooledNode node = pool(left, right);
  return NodeSplitScorer(SplitRule::BsGradient, node.times, node.events, pooled_grid).score(node.goes_left);
}

std::vector<double> event_time_deciles(std::span<const double> times, std::span<const int> events) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i] == 1) event_times.push_back(times[i]);
  }
  std::vector<double> grid;
  if (event_times.empty()) return grid;
  std::sort(event_times.begin(), event_times.end());
  const auto m = static_cast<double>(event_times.size());
  for (int decile = 1; decile <= 9; ++decile) {
    // Type-1 quantile: smallest order statistic with ECDF >= q.
    auto rank = static_cast<std::size_t>(std::ceil(decile * m / 10.0 - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, event_times.size());
    const double v = event_times[rank - 1];
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

NodeSplitScorer::NodeSplitScorer(SplitRule rule, std::span<const double> times, std::span<const int> events)
    : NodeSplitScorer(rule, times, events,
                      rule == SplitRule::BsGradient ? event_time_deciles(times, events) : std::vector<double>{}) {}

NodeSplitScorer::NodeSplitScorer(SplitRule rule, std::span<const double> times, std::span<const int> events,
                                 std::span<const double> bs_grid)
    : rule_(rule), n_(times.size()), events_(events) {
  if (times.size() != events.size()) throw std::invalid_argument("NodeSplitScorer: length mismatch");
  for (std::size_t i = 0; i < n_;) {
    std::size_t j = i;
    int deaths = 0;
    while (j < n_ && times[j] == times[i]) {
      deaths += events[j] == 1 ? 1 : 0;
      ++j;
    }
    if (j < n_ && times[j] < times[i]) throw std::invalid_argument("NodeSplitScorer: times must be sorted");
    group_end_.push_back(j);
    group_deaths_.push_back(deaths);
    i = j;
  }

  if (rule_ == SplitRule::LogRankScore) {
    scores_.resize(n_);
    double hazard = 0.0;
    std::size_t start = 0;
    for (std::size_t g = 0; g < group_end_.size(); ++g) {
      const auto at_risk = static_cast<double>(n_ - start);
      hazard += group_deaths_[g] / at_risk;
      for (std::size_t i = start; i < group_end_[g]; ++i) scores_[i] = events[i] - hazard;
      start = group_end_[g];
    }
    if (n_ > 1) {
      score_mean_ = std::accumulate(scores_.begin(), scores_.end(), 0.0) / static_cast<double>(n_);
      double ss = 0.0;
      for (double a : scores_) ss += (a - score_mean_) * (a - score_mean_);
      score_var_ = ss / static_cast<double>(n_ - 1);
    }
  }

  if (rule_ == SplitRule::BsGradient) {
    std::size_t g = 0;
    double surv = 1.0;
    std::size_t at_risk = n_;
    for (double t : bs_grid) {
      while (g < group_end_.size() && times[group_end_[g] - 1] <= t) {
        const std::size_t start = g == 0 ? 0 : group_end_[g - 1];
        if (group_deaths_[g] > 0) surv *= 1.0 - static_cast<double>(group_deaths_[g]) / static_cast<double>(at_risk);
        at_risk -= group_end_[g] - start;
        ++g;
      }
      grid_groups_.push_back(g);
      const auto above = static_cast<double>(at_risk);
      const auto below = static_cast<double>(n_ - at_risk);
      parent_impurity_.push_back((above * (1.0 - surv) * (1.0 - surv) + below * surv * surv) /
                                 static_cast<double>(n_));
    }
  }
}

double NodeSplitScorer::score(std::span<const std::uint8_t> goes_left) const {
  if (goes_left.size() != n_) throw std::invalid_argument("NodeSplitScorer: mask length mismatch");
  switch (rule_) {
    case SplitRule::LogRank: return logrank(goes_left);
    case SplitRule::LogRankScore: return logrank_score(goes_left);
    case SplitRule::BsGradient: return brier_gain(goes_left);
  }
  return 0.0;
}

double NodeSplitScorer::logrank(std::span<const std::uint8_t> goes_left) const {
  auto at_risk_left = static_cast<double>(std::count_if(goes_left.begin(), goes_left.end(),
                                                        [](std::uint8_t v) { return v != 0; }));
  auto at_risk = static_cast<double>(n_);
  double observed = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  std::size_t start = 0;
  for (std::size_t g = 0; g < group_end_.size(); ++g) {
    double left_count = 0.0;
    double left_deaths = 0.0;
    for (std::size_t i = start; i < group_end_[g]; ++i) {
      if (goes_left[i]) {
        left_count += 1.0;
        if (events_[i] == 1) left_deaths += 1.0;
      }
    }
    const double deaths = group_deaths_[g];
    if (deaths > 0) {
      const double frac = at_risk_left / at_risk;
      observed += left_deaths;
      expected += deaths * frac;
      if (at_risk > 1.0) variance += deaths * frac * (1.0 - frac) * (at_risk - deaths) / (at_risk - 1.0);
    }
    at_risk -= static_cast<double>(group_end_[g] - start);
    at_risk_left -= left_count;
    start = group_end_[g];
  }
  if (!(variance > 0.0)) return 0.0;
  return std::fabs(observed - expected) / std::sqrt(variance);
}

double NodeSplitScorer::logrank_score(std::span<const std::uint8_t> goes_left) const {
  if (!(score_var_ > 0.0)) return 0.0;
  double sum_left = 0.0;
  double n_left = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (goes_left[i]) {
      sum_left += scores_[i];
      n_left += 1.0;
    }
  }
  const auto n = static_cast<double>(n_);
  const double denom = n_left * (1.0 - n_left / n) * score_var_;
  if (!(denom > 0.0)) return 0.0;
  return std::fabs(sum_left - n_left * score_mean_) / std::sqrt(denom);
}

double NodeSplitScorer::brier_gain(std::span<const std::uint8_t> goes_left) const {
  if (grid_groups_.empty()) return 0.0;
  std::size_t at_risk[2] = {0, 0};  // [right, left]
  for (std::size_t i = 0; i < n_; ++i) ++at_risk[goes_left[i] ? 1 : 0];
  const std::size_t size[2] = {at_risk[0], at_risk[1]};
  double surv[2] = {1.0, 1.0};

  double total = 0.0;
  std::size_t g = 0;
  for (std::size_t m = 0; m < grid_groups_.size(); ++m) {
    for (; g < grid_groups_[m]; ++g) {
      const std::size_t start = g == 0 ? 0 : group_end_[g - 1];
      std::size_t count[2] = {0, 0};
      std::size_t deaths[2] = {0, 0};
      for (std::size_t i = start; i < group_end_[g]; ++i) {
        const int side = goes_left[i] ? 1 : 0;
        ++count[side];
        if (events_[i] == 1) ++deaths[side];
      }
      for (int s = 0; s < 2; ++s) {
        if (deaths[s] > 0) {
          surv[s] *= 1.0 - static_cast<double>(deaths[s]) / static_cast<double>(at_risk[s]);
        }
        at_risk[s] -= count[s];
      }
    }
    // n_g * impurity_g = #(T > t)(1 - S)^2 + #(T <= t) S^2
    double child_sum = 0.0;
    for (int s = 0; s < 2; ++s) {
      const auto above = static_cast<double>(at_risk[s]);
      const auto below = static_cast<double>(size[s] - at_risk[s]);
      child_sum += above * (1.0 - surv[s]) * (1.0 - surv[s]) + below * surv[s] * surv[s];
    }
    total += parent_impurity_[m] - child_sum / static_cast<double>(n_);
  }
  return total / static_cast<double>(grid_groups_.size());
}

}  // namespace rsftune
