#include "rsftune/tuner.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>

#include "parallel.hpp"
#include "rsftune/forest.hpp"
#include "rsftune/random.hpp"

namespace rsftune {

void EvalOutcome::update_means() {
  double c = 0.0;
  double b = 0.0;
  for (const auto& m : per_fold) {
    c += m.cindex;
    b += m.brier;
  }
  const auto k = static_cast<double>(per_fold.size());
  mean_cindex = per_fold.empty() ? 0.0 : c / k;
  mean_brier = per_fold.empty() ? 0.0 : b / k;
}

std::vector<PlannedConfig> plan_configs(const GridSpec& spec, const HyperParams& reference) {
  std::vector<PlannedConfig> plan;
  const auto product = enumerate_grid(spec);
  plan.reserve(product.size() + 1);
  for (std::size_t id = 0; id < product.size(); ++id) plan.push_back({id, product[id]});
  if (config_index(spec, reference)) return plan;

  std::size_t next_id = product.size();
  plan.push_back({next_id++, reference});
  for (Hyperparam h : kAllHyperparams) {
    for (double v : spec.ordinals(h)) {
      const HyperParams neighbour = with_ordinal(reference, h, v);
      if (neighbour == reference || config_index(spec, neighbour)) continue;
      bool planned = false;
      for (std::size_t i = product.size(); i < plan.size(); ++i) planned = planned || plan[i].params == neighbour;
      if (!planned) plan.push_back({next_id++, neighbour});
    }
  }
  return plan;
}

const EvalOutcome* ResultsTable::find(const HyperParams& params) const {
  for (const auto& o : outcomes) {
    if (o.params == params) return &o;
  }
  return nullptr;
}

const EvalOutcome& ResultsTable::reference_outcome() const {
  if (const EvalOutcome* o = find(reference)) return *o;
  throw std::runtime_error("results for " + dataset_id + " contain no outcome for the reference configuration (" +
                           describe(reference) + ")");
}

EvalOutcome evaluate_config(const SurvivalDataset& ds, const HyperParams& params, const FoldAssignment& folds,
                            std::uint64_t seed, std::size_t config_id) {
  params.validate();
  if (folds.assignment.size() != ds.size()) throw std::invalid_argument("fold assignment does not match dataset");

  EvalOutcome out;
  out.dataset_id = ds.id;
  out.config_id = config_id;
  out.params = params;
  out.seed = seed;
  for (int f = 0; f < folds.k; ++f) {
    const auto train_idx = folds.train_indices(f);
    const auto test_idx = folds.test_indices(f);
    const SurvivalDataset train = subset(ds, train_idx);
    const SurvivalDataset test = subset(ds, test_idx);
    if (train.event_count() == 0) {
      throw std::runtime_error("fold " + std::to_string(f) + ": training part has no events");
    }

    const SurvivalForest forest = fit(train, params, derive_seed({seed, config_id, static_cast<std::uint64_t>(f)}));
    std::vector<ChfCurve> curves;
    std::vector<double> risks;
    curves.reserve(test.size());
    for (const auto& r : test.records) {
      curves.push_back(predict_chf(forest, r.features));
      risks.push_back(mortality(curves.back()));
    }

    MetricPair m;
    try {
      m.cindex = concordance_index(risks, test.times(), test.events());
    } catch (const std::domain_error&) {
      throw std::runtime_error("fold " + std::to_string(f) + ": C-index undefined (no comparable pairs)");
    }
    const StepFunction censoring = km_censoring(train.times(), train.events());
    const auto grid = default_brier_grid(test.times());
    m.brier = integrated_brier([&](std::size_t i, double t) { return std::exp(-curves[i].at(t)); }, test, censoring,
                               grid);
    out.per_fold.push_back(m);
  }
  out.update_means();
  return out;
}

ResultsTable run_grid(const SurvivalDataset& ds, const GridSpec& spec, const GridRunOptions& options) {
  spec.validate();
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
  ds.validate();

  ResultsTable table;
  table.dataset_id = ds.id;
  table.grid = spec;
  table.reference = spec.defaults.resolve(ds.feature_dim());
  table.k = options.k;
  table.seed = options.seed;

  const FoldAssignment folds = make_folds(ds, options.k, options.seed);
  const auto plan = plan_configs(spec, table.reference);

  std::vector<std::optional<EvalOutcome>> results(plan.size());
  std::map<std::size_t, std::size_t> slot_of;
  for (std::size_t i = 0; i < plan.size(); ++i) slot_of[plan[i].config_id] = i;
  for (const auto& done : options.completed) {
    auto it = slot_of.find(done.config_id);
    if (it == slot_of.end() || !(plan[it->second].params == done.params) ||
        done.per_fold.size() != static_cast<std::size_t>(options.k)) {
      throw std::invalid_argument("resumed outcome for config " + std::to_string(done.config_id) +
                                  " does not match the grid");
    }
    results[it->second] = done;
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!results[i]) pending.push_back(i);
  }
  std::vector<bool> fresh(plan.size(), false);
  for (std::size_t i : pending) fresh[i] = true;

  std::mutex commit_mutex;
  std::size_t next_commit = 0;
  const auto commit_ready = [&] {
    while (next_commit < plan.size() && results[next_commit]) {
      if (fresh[next_commit] && options.on_outcome) options.on_outcome(*results[next_commit]);
      ++next_commit;
    }
  };
  {
    std::lock_guard lock(commit_mutex);
    commit_ready();
  }

  detail::parallel_for(pending.size(), options.workers, [&](std::size_t j) {
    const std::size_t slot = pending[j];
    EvalOutcome outcome;
    try {
      outcome = evaluate_config(ds, plan[slot].params, folds, options.seed, plan[slot].config_id);
    } catch (const std::exception& e) {
      throw std::runtime_error("config " + std::to_string(plan[slot].config_id) + " (" +
                               describe(plan[slot].params) + "): " + e.what());
    }
    std::lock_guard lock(commit_mutex);
    results[slot] = std::move(outcome);
    commit_ready();
  });

  table.outcomes.reserve(plan.size());
  for (auto& r : results) table.outcomes.push_back(std::move(*r));
  return table;
}

}  // namespace rsftune
