#pragma once

#include <span>
#include <vector>

namespace rsftune {

/// Cumulative hazard tabulated on a strictly increasing time grid. Evaluation
/// is a right-continuous step function that is 0 before the first grid time.
struct ChfCurve {
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const;
};

/// Nelson-Aalen cumulative hazard H(t) = sum over event times t_k <= t of
/// d_k / Y_k, with Y_k the number of subjects whose time is >= t_k, tabulated
/// on `grid`. Duplicated subjects (bootstrap draws) count once per copy.
ChfCurve nelson_aalen(std::span<const double> times, std::span<const int> events,
                      std::span<const double> grid);

}  // namespace rsftune
