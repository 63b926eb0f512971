#include "rsftune/estimators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rsftune {

double ChfCurve::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

ChfCurve nelson_aalen(std::span<const double> times, std::span<const int> events,
                      std::span<const double> grid) {
  if (times.empty()) throw std::invalid_argument("nelson_aalen: empty input");
  if (times.size() != events.size()) throw std::invalid_argument("nelson_aalen: length mismatch");
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (!(grid[g] > grid[g - 1])) throw std::invalid_argument("nelson_aalen: grid must be strictly increasing");
  }

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  ChfCurve curve;
  curve.times.assign(grid.begin(), grid.end());
  curve.values.assign(grid.size(), 0.0);

  const std::size_t n = order.size();
  double hazard = 0.0;
  std::size_t i = 0;
  std::size_t g = 0;
  while (i < n) {
    const double t = times[order[i]];
    const auto at_risk = static_cast<double>(n - i);
    int deaths = 0;
    std::size_t j = i;
    while (j < n && times[order[j]] == t) {
      deaths += events[order[j]] == 1 ? 1 : 0;
      ++j;
    }
    while (g < grid.size() && grid[g] < t) curve.values[g++] = hazard;
    if (deaths > 0) hazard += deaths / at_risk;
    i = j;
  }
  while (g < grid.size()) curve.values[g++] = hazard;
  return curve;
}

}  // namespace rsftune
