#include "rsftune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace rsftune {

double StepFunction::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return left_value;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return left_value;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted positions < i.
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

void check_lengths(std::size_t a, std::size_t b, std::size_t c, const char* what) {
  if (a != b || a != c) throw std::invalid_argument(std::string(what) + ": input lengths differ");
}

}  // namespace

double concordance_index(std::span<const double> risks, std::span<const double> times,
                         std::span<const int> events) {
  check_lengths(risks.size(), times.size(), events.size(), "concordance_index");
  const std::size_t n = risks.size();
  if (n < 2) throw std::invalid_argument("concordance_index: need at least 2 observations");
  for (double r : risks) {
    if (std::isnan(r)) throw std::invalid_argument("concordance_index: NaN risk");
  }

  std::vector<double> levels(risks.begin(), risks.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const auto rank_of = [&](double r) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), r) - levels.begin());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] > times[b]; });

  // Sweep from the longest time down; everything already inserted has a
  // strictly larger time than the current group.
  Fenwick tree(levels.size());
  std::int64_t inserted = 0;
  std::int64_t pairs = 0;
  std::int64_t concordant = 0;
  std::int64_t tied = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && times[order[end]] == times[order[start]]) ++end;
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t i = order[k];
      if (events[i] != 1) continue;
      const std::size_t r = rank_of(risks[i]);
      const std::int64_t below = tree.prefix(r);
      const std::int64_t equal = tree.prefix(r + 1) - below;
      pairs += inserted;
      concordant += below;
      tied += equal;
    }
    for (std::size_t k = start; k < end; ++k) tree.add(rank_of(risks[order[k]]));
    inserted += static_cast<std::int64_t>(end - start);
    start = end;
  }
  if (pairs == 0) throw std::domain_error("concordance_index: no comparable pairs");
  return static_cast<double>(2 * concordant + tied) / static_cast<double>(2 * pairs);
}

StepFunction km_censoring(std::span<const double> times, std::span<const int> events) {
  if (times.empty()) throw std::invalid_argument("km_censoring: empty input");
  if (times.size() != events.size()) throw std::invalid_argument("km_censoring: input lengths differ");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  StepFunction g;
  g.left_value = 1.0;
  double surv = 1.0;
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t failures = 0;
    std::size_t censored = 0;
    while (j < n && times[order[j]] == times[order[i]]) {
      (events[order[j]] == 1 ? failures : censored) += 1;
      ++j;
    }
    if (censored > 0) {
      const auto at_risk = static_cast<double>(n - i - failures);
      surv *= 1.0 - static_cast<double>(censored) / at_risk;
      g.times.push_back(times[order[i]]);
      g.values.push_back(surv);
    }
    i = j;
  }
  return g;
}

double brier_at(std::span<const double> surv_probs, std::span<const double> times, std::span<const int> events,
                double t, const StepFunction& censoring) {
  check_lengths(surv_probs.size(), times.size(), events.size(), "brier_at");
  if (!(t > 0.0)) throw std::invalid_argument("brier_at: t must be positive");
  double total = 0.0;
  std::size_t used = 0;
  const double g_t = censoring.at(t);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = surv_probs[i];
    if (times[i] <= t && events[i] == 1) {
      const double w = censoring.left_limit(times[i]);
      if (w <= 0.0) continue;
      total += s * s / w;
    } else if (times[i] > t) {
      if (g_t <= 0.0) continue;
      total += (1.0 - s) * (1.0 - s) / g_t;
    }
    ++used;
  }
  if (used == 0) throw std::domain_error("brier_at: every term has zero censoring weight");
  return total / static_cast<double>(used);
}

double integrated_brier(const SurvivalProvider& predict, const SurvivalDataset& eval_set,
                        const StepFunction& censoring, std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw std::invalid_argument("integrated_brier: grid needs at least 2 times");
  const std::vector<double> times = eval_set.times();
  const std::vector<int> events = eval_set.events();
  const double max_time = *std::max_element(times.begin(), times.end());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0) || t_grid[k] > max_time) {
      throw std::invalid_argument("integrated_brier: grid time outside (0, max observed time]");
    }
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) {
      throw std::invalid_argument("integrated_brier: grid must be strictly increasing");
    }
  }

  std::vector<double> probs(times.size());
  std::vector<double> scores;
  scores.reserve(t_grid.size());
  for (double t : t_grid) {
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = predict(i, t);
    scores.push_back(brier_at(probs, times, events, t, censoring));
  }
  double area = 0.0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    area += 0.5 * (scores[k - 1] + scores[k]) * (t_grid[k] - t_grid[k - 1]);
  }
  return area / (t_grid.back() - t_grid.front());
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> default_brier_grid(std::span<const double> times, std::size_t points) {
  if (points < 2) throw std::invalid_argument("default_brier_grid: need at least 2 points");
  std::vector<double> t(times.begin(), times.end());
  const double lo = quantile_linear(t, 0.05);
  const double hi = quantile_linear(t, 0.95);
  if (!(hi > lo)) throw std::domain_error("default_brier_grid: observed times have no spread");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.back() = hi;
  return grid;
}

}  // namespace rsftune
