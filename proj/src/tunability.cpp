#include "rsftune/tunability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "rsftune/metrics.hpp"
#include "rsftune/model_io.hpp"
#include "rsftune/text.hpp"

namespace rsftune {

using nlohmann::json;

std::string_view to_string(RiskMetric m) { return m == RiskMetric::CIndex ? "cindex" : "brier"; }

RiskMetric parse_risk_metric(std::string_view s) {
  if (s == "cindex") return RiskMetric::CIndex;
  if (s == "brier") return RiskMetric::Brier;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "' (expected cindex or brier)");
}

double risk(const EvalOutcome& o, RiskMetric metric) {
  return metric == RiskMetric::CIndex ? 1.0 - o.mean_cindex : o.mean_brier;
}

const EvalOutcome& best_outcome(const ResultsTable& table, RiskMetric metric) {
  if (table.outcomes.empty()) throw std::invalid_argument("results for " + table.dataset_id + " are empty");
  const EvalOutcome* best = &table.outcomes.front();
  for (const auto& o : table.outcomes) {
    const double r = risk(o, metric);
    const double rb = risk(*best, metric);
    if (r < rb || (r == rb && o.config_id < best->config_id)) best = &o;
  }
  return *best;
}

double model_tunability(const ResultsTable& table, RiskMetric metric) {
  return risk(table.reference_outcome(), metric) - risk(best_outcome(table, metric), metric);
}

namespace {

std::string csv_value(const HyperParams& p, Hyperparam h) {
  if (h == Hyperparam::SplitRule) return std::to_string(split_rule_code(p.splitrule));
  return value_label(p, h);
}

}  // namespace

std::vector<SliceEntry> slice(const ResultsTable& table, Hyperparam h, RiskMetric metric) {
  std::vector<SliceEntry> entries;
  for (double v : table.grid.ordinals(h)) {
    SliceEntry e;
    e.ordinal = v;
    e.params = with_ordinal(table.reference, h, v);
    const EvalOutcome* o = table.find(e.params);
    if (!o) {
      throw std::runtime_error("results for " + table.dataset_id + " lack the " + std::string(to_string(h)) +
                               " slice configuration (" + describe(e.params) + ")");
    }
    e.value = csv_value(e.params, h);
    e.risk = risk(*o, metric);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw std::runtime_error("empty " + std::string(to_string(h)) + " slice");
  return entries;
}

HyperParams best_config_single_hyperparam(const ResultsTable& table, Hyperparam h, RiskMetric metric) {
  const auto entries = slice(table, h, metric);
  const double ref = ordinal(table.reference, h);
  const SliceEntry* best = &entries.front();
  for (const auto& e : entries) {
    if (e.risk != best->risk) {
      if (e.risk < best->risk) best = &e;
      continue;
    }
    const double de = ordinal_distance(h, e.ordinal, ref);
    const double db = ordinal_distance(h, best->ordinal, ref);
    if (de < db || (de == db && e.ordinal < best->ordinal)) best = &e;
  }
  return best->params;
}

double hyperparam_tunability(const ResultsTable& table, Hyperparam h, RiskMetric metric) {
  const HyperParams best = best_config_single_hyperparam(table, h, metric);
  return risk(table.reference_outcome(), metric) - risk(*table.find(best), metric);
}

std::optional<double> relative_tunability(const ResultsTable& table, Hyperparam h, RiskMetric metric) {
  const double d = model_tunability(table, metric);
  if (d == 0.0) return std::nullopt;
  return hyperparam_tunability(table, h, metric) / d;
}

std::vector<RangeEntry> range_map(const ResultsTable& table, Hyperparam h, RiskMetric metric) {
  const double ref_risk = risk(table.reference_outcome(), metric);
  std::vector<RangeEntry> out;
  for (const auto& e : slice(table, h, metric)) out.push_back({e.ordinal, e.value, ref_risk - e.risk});
  std::stable_sort(out.begin(), out.end(), [](const RangeEntry& a, const RangeEntry& b) { return a.ordinal < b.ordinal; });
  return out;
}

double aggregate(const std::map<std::string, double>& values, AggregateStat stat, double q) {
  if (values.empty()) throw std::invalid_argument("aggregate over no datasets");
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& [id, x] : values) v.push_back(x);
  switch (stat) {
    case AggregateStat::Mean: {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    }
    case AggregateStat::Median: return quantile_linear(std::move(v), 0.5);
    case AggregateStat::Min: return *std::min_element(v.begin(), v.end());
    case AggregateStat::Max: return *std::max_element(v.begin(), v.end());
    case AggregateStat::Quantile: return quantile_linear(std::move(v), q);
  }
  return 0.0;
}

Summary summarize(const std::map<std::string, double>& values) {
  return {aggregate(values, AggregateStat::Mean), aggregate(values, AggregateStat::Median),
          aggregate(values, AggregateStat::Min), aggregate(values, AggregateStat::Max)};
}

TunabilityReport build_report(std::span<const ResultsTable> tables, RiskMetric metric) {
  if (tables.empty()) throw std::invalid_argument("tunability report needs at least one results table");
  TunabilityReport report;
  report.metric = metric;
  std::set<std::string> seen;
  std::map<std::string, double> defaults, bests, ds;
  std::map<Hyperparam, std::map<std::string, double>> di, drel;

  for (const auto& table : tables) {
    if (!seen.insert(table.dataset_id).second) {
      throw std::invalid_argument("dataset '" + table.dataset_id + "' given more than once");
    }
    DatasetTunability t;
    t.dataset_id = table.dataset_id;
    const EvalOutcome& ref = table.reference_outcome();
    const EvalOutcome& best = best_outcome(table, metric);
    t.default_risk = risk(ref, metric);
    t.best_risk = risk(best, metric);
    t.d = t.default_risk - t.best_risk;
    t.best_config_id = best.config_id;
    t.best_params = best.params;
    for (Hyperparam h : kAllHyperparams) {
      t.best_single[h] = best_config_single_hyperparam(table, h, metric);
      t.d_i[h] = t.default_risk - risk(*table.find(t.best_single[h]), metric);
      t.d_rel[h] = t.d == 0.0 ? std::nullopt : std::optional<double>(t.d_i[h] / t.d);
      t.ranges[h] = range_map(table, h, metric);
      di[h][t.dataset_id] = t.d_i[h];
      if (t.d_rel[h]) drel[h][t.dataset_id] = *t.d_rel[h];
    }
    defaults[t.dataset_id] = t.default_risk;
    bests[t.dataset_id] = t.best_risk;
    ds[t.dataset_id] = t.d;
    report.datasets.push_back(std::move(t));
  }

  report.default_risk_summary = summarize(defaults);
  report.best_risk_summary = summarize(bests);
  report.d_summary = summarize(ds);
  for (Hyperparam h : kAllHyperparams) {
    report.d_i_summary[h] = summarize(di[h]);
    report.d_rel_summary[h] = drel[h].empty() ? std::nullopt : std::optional<Summary>(summarize(drel[h]));
  }
  return report;
}

namespace {

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_field(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

constexpr std::array<const char*, 4> kStatNames = {"mean", "median", "min", "max"};

double pick(const Summary& s, std::size_t stat) {
  switch (stat) {
    case 0: return s.mean;
    case 1: return s.median;
    case 2: return s.min;
    default: return s.max;
  }
}

}  // namespace

json report_to_json(const TunabilityReport& report) {
  json j;
  j["metric"] = std::string(to_string(report.metric));
  json datasets = json::array();
  for (const auto& t : report.datasets) {
    json dj;
    dj["dataset_id"] = t.dataset_id;
    dj["default_risk"] = t.default_risk;
    dj["best_risk"] = t.best_risk;
    dj["d"] = t.d;
    dj["best_config_id"] = t.best_config_id;
    dj["best_params"] = params_to_json(t.best_params);
    json hp = json::object();
    for (Hyperparam h : kAllHyperparams) {
      json range = json::array();
      for (const auto& e : t.ranges.at(h)) range.push_back({{"value", e.value}, {"d_iv", e.d}});
      hp[std::string(to_string(h))] = {{"d_i", t.d_i.at(h)},
                                       {"d_rel", optional_json(t.d_rel.at(h))},
                                       {"best_value", value_label(t.best_single.at(h), h)},
                                       {"range", range}};
    }
    dj["hyperparams"] = hp;
    datasets.push_back(dj);
  }
  j["datasets"] = datasets;

  json agg;
  agg["default_risk"] = summary_json(report.default_risk_summary);
  agg["best_risk"] = summary_json(report.best_risk_summary);
  agg["d"] = summary_json(report.d_summary);
  json hp = json::object();
  for (Hyperparam h : kAllHyperparams) {
    const auto& rel = report.d_rel_summary.at(h);
    hp[std::string(to_string(h))] = {{"d_i", summary_json(report.d_i_summary.at(h))},
                                     {"d_rel", rel ? summary_json(*rel) : json(nullptr)}};
  }
  agg["hyperparams"] = hp;
  j["aggregates"] = agg;
  return j;
}

void write_model_csv(std::ostream& out, std::span<const TunabilityReport> reports) {
  out << "dataset,metric,default_risk,best_risk,d\n";
  for (const auto& r : reports) {
    for (const auto& t : r.datasets) {
      out << t.dataset_id << ',' << to_string(r.metric) << ',' << text::format_double(t.default_risk) << ','
          << text::format_double(t.best_risk) << ',' << text::format_double(t.d) << '\n';
    }
  }
  for (std::size_t s = 0; s < kStatNames.size(); ++s) {
    for (const auto& r : reports) {
      out << kStatNames[s] << ',' << to_string(r.metric) << ','
          << text::format_double(pick(r.default_risk_summary, s)) << ','
          << text::format_double(pick(r.best_risk_summary, s)) << ',' << text::format_double(pick(r.d_summary, s))
          << '\n';
    }
  }
}

void write_hyperparam_csv(std::ostream& out, std::span<const TunabilityReport> reports) {
  out << "dataset,metric,hyperparam,d_i,d_rel\n";
  for (const auto& r : reports) {
    for (const auto& t : r.datasets) {
      for (Hyperparam h : kAllHyperparams) {
        out << t.dataset_id << ',' << to_string(r.metric) << ',' << to_string(h) << ','
            << text::format_double(t.d_i.at(h)) << ',' << opt_field(t.d_rel.at(h)) << '\n';
      }
    }
  }
  for (std::size_t s = 0; s < kStatNames.size(); ++s) {
    for (const auto& r : reports) {
      for (Hyperparam h : kAllHyperparams) {
        const auto& rel = r.d_rel_summary.at(h);
        out << kStatNames[s] << ',' << to_string(r.metric) << ',' << to_string(h) << ','
            << text::format_double(pick(r.d_i_summary.at(h), s)) << ','
            << opt_field(rel ? std::optional<double>(pick(*rel, s)) : std::nullopt) << '\n';
      }
    }
  }
}

void write_range_csv(std::ostream& out, std::span<const TunabilityReport> reports) {
  out << "dataset,metric,hyperparam,value,d_iv\n";
  for (const auto& r : reports) {
    for (const auto& t : r.datasets) {
      for (Hyperparam h : kAllHyperparams) {
        for (const auto& e : t.ranges.at(h)) {
          out << t.dataset_id << ',' << to_string(r.metric) << ',' << to_string(h) << ',' << e.value << ','
              << text::format_double(e.d) << '\n';
        }
      }
    }
  }
  // Aggregate per (hyperparam, value) over the datasets whose grid has that value.
  for (std::size_t s = 0; s < kStatNames.size(); ++s) {
    for (const auto& r : reports) {
      for (Hyperparam h : kAllHyperparams) {
        std::vector<std::pair<double, std::string>> values;
        std::map<std::string, std::map<std::string, double>> by_value;
        for (const auto& t : r.datasets) {
          for (const auto& e : t.ranges.at(h)) {
            if (by_value[e.value].empty()) values.emplace_back(e.ordinal, e.value);
            by_value[e.value][t.dataset_id] = e.d;
          }
        }
        std::stable_sort(values.begin(), values.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [ord, label] : values) {
          out << kStatNames[s] << ',' << to_string(r.metric) << ',' << to_string(h) << ',' << label << ','
              << text::format_double(pick(summarize(by_value[label]), s)) << '\n';
        }
      }
    }
  }
}

}  // namespace rsftune
