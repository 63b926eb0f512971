#include "fixtures.hpp"

#include <fstream>
#include <stdexcept>

#include "rsftune/results_io.hpp"

namespace rsftest {

namespace fs = std::filesystem;
using namespace rsftune;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rsftune_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Sample random_sample(std::mt19937_64& gen, std::size_t n, int max_time, double censor_rate) {
  Sample s;
  for (std::size_t i = 0; i < n; ++i) {
    s.times.push_back(1.0 + static_cast<double>(gen() % static_cast<std::uint64_t>(max_time)));
    s.events.push_back(uniform01(gen) < censor_rate ? 0 : 1);
  }
  return s;
}

SurvivalDataset random_dataset(std::mt19937_64& gen, const std::string& id, std::size_t n, std::size_t extra,
                               double censor_rate) {
  SurvivalDataset ds;
  ds.id = id;
  ds.feature_names.push_back("signal");
  for (std::size_t j = 0; j < extra; ++j) ds.feature_names.push_back("noise_" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    SurvivalRecord r;
    r.unit_id = static_cast<int>(i + 1);
    r.time = 5.0 + std::floor(100.0 * uniform01(gen));
    r.event = uniform01(gen) < censor_rate ? 0 : 1;
    r.features.push_back(-r.time + 20.0 * (uniform01(gen) - 0.5));
    for (std::size_t j = 0; j < extra; ++j) r.features.push_back(uniform01(gen));
    ds.records.push_back(std::move(r));
  }
  if (ds.event_count() == 0) ds.records.front().event = 1;
  return ds;
}

ResultsTable table_from_scores(const GridSpec& spec, const HyperParams& reference, const std::string& dataset_id,
                               const std::function<MetricPair(const HyperParams&)>& score) {
  ResultsTable t;
  t.dataset_id = dataset_id;
  t.grid = spec;
  t.reference = reference;
  t.k = 1;
  t.seed = 0;
  for (const auto& planned : plan_configs(spec, reference)) {
    EvalOutcome o;
    o.dataset_id = dataset_id;
    o.config_id = planned.config_id;
    o.params = planned.params;
    o.per_fold = {score(planned.params)};
    o.update_means();
    t.outcomes.push_back(o);
  }
  return t;
}

GridSpec small_grid() {
  GridSpec g;
  g.ntree_values = {100, 500};
  g.mtry_values = {1, 2, 4};
  g.nodesize_values = {15};
  g.nodedepth_values = {NodeDepth::limited(5), NodeDepth::unlimited()};
  g.splitrule_values = {SplitRule::LogRank, SplitRule::LogRankScore};
  g.nsplit_values = {10};
  g.defaults.mtry = 2;
  return g;
}

const std::array<PublishedRow, 4> kPublishedRows = {{
    {"FD001", 0.7204, 0.7705, 0.0492, 0.1422, 0.1225, 0.0197},
    {"FD002", 0.6658, 0.7294, 0.0636, 0.1484, 0.1327, 0.0157},
    {"FD003", 0.8190, 0.8718, 0.0528, 0.1158, 0.0935, 0.0222},
    {"FD004", 0.7634, 0.8169, 0.0534, 0.1309, 0.1088, 0.0221},
}};

std::vector<fs::path> write_published_fixture(const fs::path& dir) {
  fs::create_directories(dir);
  // Singleton lists except ntree; the default (500) is the reference, 1000 is
  // the C-index optimum and 1500 the Brier optimum. The off-metric scores of
  // the two optima are made worse than the reference so each argmin is
  // unambiguous.
  GridSpec spec;
  spec.ntree_values = {500, 1000, 1500};
  spec.mtry_values = {6};
  spec.nodesize_values = {15};
  spec.nodedepth_values = {NodeDepth::unlimited()};
  spec.splitrule_values = {SplitRule::LogRank};
  spec.nsplit_values = {10};
  spec.defaults.mtry = 6;
  const HyperParams reference = spec.defaults.resolve(45);
  const int k = 5;

  std::vector<fs::path> paths;
  for (const auto& row : kPublishedRows) {
    ResultsTable table;
    table.dataset_id = row.id;
    table.grid = spec;
    table.reference = reference;
    table.k = k;
    table.seed = 42;
    const std::array<MetricPair, 3> scores = {{{row.cindex_default, row.brier_default},
                                               {row.cindex_best, row.brier_default + 0.01},
                                               {row.cindex_default - 0.01, row.brier_best}}};
    for (std::size_t c = 0; c < 3; ++c) {
      EvalOutcome o;
      o.dataset_id = row.id;
      o.config_id = c;
      o.params = config_at(spec, c);
      o.per_fold.assign(k, scores[c]);
      o.update_means();
      o.seed = 42;
      table.outcomes.push_back(o);
    }

    const fs::path results = results_path(dir, row.id);
    std::ofstream out(results, std::ios::binary);
    write_results_csv(out, table);
    out.close();

    RunManifest m;
    m.command = "grid";
    m.dataset_id = row.id;
    m.feature_dim = 45;
    m.k = k;
    m.seed = 42;
    m.grid = spec;
    m.reference = reference;
    m.status = "complete";
    m.tool_version = tool_version();
    save_manifest(manifest_path(dir, row.id), m);
    paths.push_back(results);
  }
  return paths;
}

}  // namespace rsftest
