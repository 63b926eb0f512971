#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rsftune/dataset.hpp"
#include "rsftune/grid.hpp"
#include "rsftune/metrics.hpp"
#include "rsftune/tuner.hpp"

namespace rsftest {

/// Fresh, empty scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

struct Sample {
  std::vector<double> times;
  std::vector<int> events;
};

/// Integer-valued times in [1, max_time] (so ties are common), each censored
/// with probability censor_rate.
Sample random_sample(std::mt19937_64& gen, std::size_t n, int max_time, double censor_rate);

/// Dataset with one informative feature (minus the time, plus noise) and
/// `extra` pure-noise features.
rsftune::SurvivalDataset random_dataset(std::mt19937_64& gen, const std::string& id, std::size_t n,
                                        std::size_t extra, double censor_rate);

double uniform01(std::mt19937_64& gen);

/// Results table whose outcome for each configuration carries the given
/// scores in a single fold, so mean == the score exactly.
rsftune::ResultsTable table_from_scores(const rsftune::GridSpec& spec, const rsftune::HyperParams& reference,
                                        const std::string& dataset_id,
                                        const std::function<rsftune::MetricPair(const rsftune::HyperParams&)>& score);

/// Small 2x3x1x2x2x1 grid whose reference (ntree 500, mtry 2, nodesize 15,
/// depth none, logrank, nsplit 10) is in the product.
rsftune::GridSpec small_grid();

/// Displayed default and best values per subset for the two metrics, plus the
/// published per-subset tunabilities and their averages.
struct PublishedRow {
  const char* id;
  double cindex_default, cindex_best, cindex_d;
  double brier_default, brier_best, brier_d;
};
extern const std::array<PublishedRow, 4> kPublishedRows;
inline constexpr double kPublishedCIndexAverage = 0.0547;
inline constexpr double kPublishedBrierAverage = 0.0199;

/// Writes one <id>.results.csv + <id>.manifest.json pair per published row
/// into `dir` and returns the results paths. Each subset gets three
/// configurations: the reference, a C-index optimum and a Brier optimum.
std::vector<std::filesystem::path> write_published_fixture(const std::filesystem::path& dir);

}  // namespace rsftest
