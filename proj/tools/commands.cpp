#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "rsftune/dataset.hpp"
#include "rsftune/forest.hpp"
#include "rsftune/grid.hpp"
#include "rsftune/metrics.hpp"
#include "rsftune/model_io.hpp"
#include "rsftune/results_io.hpp"
#include "rsftune/text.hpp"
#include "rsftune/tunability.hpp"
#include "rsftune/tuner.hpp"

namespace rsftune::cli {

namespace fs = std::filesystem;

fs::path default_output_dir() {
  if (const char* env = std::getenv("RSFTUNE_OUT"); env != nullptr && *env != '\0') return env;
  return "out";
}

namespace {

fs::path prepare_out(const fs::path& dir) {
  const fs::path d = dir.empty() ? default_output_dir() : dir;
  fs::create_directories(d);
  return d;
}

std::string dataset_id_for(const fs::path& data, const std::string& id) {
  return id.empty() ? data.stem().string() : id;
}

SurvivalDataset load_dataset(const fs::path& data, const std::string& id) {
  if (!fs::exists(data)) throw std::runtime_error("no such file: " + data.string());
  return read_dataset_csv(data, dataset_id_for(data, id));
}

RunManifest base_manifest(const std::string& command, const std::vector<std::string>& argv, const fs::path& out) {
  RunManifest m;
  m.command = command;
  m.argv = argv;
  m.output_dir = out.string();
  m.tool_version = tool_version();
  return m;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("error writing " + path.string());
}

}  // namespace

void cmd_ingest(const IngestOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.id.empty()) throw std::invalid_argument("--id must not be empty");
  if (!fs::exists(o.input)) throw std::runtime_error("no such file: " + o.input.string());
  SurvivalDataset ds = ingest_cmapss(o.input, o.id, o.window);
  if (o.censor_quantile) ds = apply_censoring(ds, *o.censor_quantile);

  const fs::path dir = prepare_out(o.out_dir);
  const fs::path csv = dir / (o.id + ".csv");
  write_dataset_csv(csv, ds);

  RunManifest m = base_manifest("ingest", argv, dir);
  m.inputs = {o.input.string()};
  m.dataset_id = o.id;
  m.feature_dim = ds.feature_dim();
  m.extra = {{"window", o.window}, {"output", csv.string()}};
  if (o.censor_quantile) m.extra["censor_quantile"] = *o.censor_quantile;
  m.status = "complete";
  save_manifest(dir / (o.id + ".ingest.manifest.json"), m);

  out << o.id << ": n=" << ds.size() << " p=" << ds.feature_dim() << " events=" << ds.event_count()
      << " median_time=" << text::format_double(quantile_linear(ds.times(), 0.5)) << " -> " << csv.string() << '\n';
}

void cmd_fit(const FitOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const SurvivalDataset ds = load_dataset(o.data, o.id);
  HyperParams p;
  p.ntree = o.ntree;
  p.mtry = o.mtry ? *o.mtry : default_mtry(ds.feature_dim());
  p.nodesize = o.nodesize;
  p.nodedepth = NodeDepth::parse(o.nodedepth);
  p.splitrule = parse_split_rule(o.splitrule);
  p.nsplit = o.nsplit;
  p.validate();

  const fs::path dir = prepare_out(o.out_dir);
  const fs::path model = o.model.empty() ? dir / (ds.id + ".model.json") : o.model;
  const SurvivalForest forest = fit(ds, p, o.seed, o.workers);
  save_forest(model, forest);

  RunManifest m = base_manifest("fit", argv, dir);
  m.inputs = {o.data.string()};
  m.dataset_id = ds.id;
  m.feature_dim = ds.feature_dim();
  m.seed = o.seed;
  m.workers = o.workers;
  m.extra = {{"params", params_to_json(p)}, {"model", model.string()}};
  m.status = "complete";
  save_manifest(dir / (ds.id + ".fit.manifest.json"), m);

  out << ds.id << ": fitted " << describe(p) << " seed=" << o.seed << " -> " << model.string() << '\n';
}

void cmd_eval(const EvalOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const SurvivalDataset ds = load_dataset(o.data, o.id);
  if (!fs::exists(o.model)) throw std::runtime_error("no such file: " + o.model.string());
  const SurvivalForest forest = load_forest(o.model);
  if (forest.feature_dim != ds.feature_dim()) {
    throw std::invalid_argument("model expects " + std::to_string(forest.feature_dim) + " features but " +
                                o.data.string() + " has " + std::to_string(ds.feature_dim()));
  }

  std::vector<ChfCurve> curves;
  std::vector<double> risks;
  for (const auto& r : ds.records) {
    curves.push_back(predict_chf(forest, r.features));
    risks.push_back(mortality(curves.back()));
  }
  MetricPair mp;
  mp.cindex = concordance_index(risks, ds.times(), ds.events());
  StepFunction censoring;
  if (o.train.empty()) {
    censoring = km_censoring(ds.times(), ds.events());
  } else {
    const SurvivalDataset train = load_dataset(o.train, "");
    censoring = km_censoring(train.times(), train.events());
  }
  const auto grid = default_brier_grid(ds.times());
  mp.brier = integrated_brier([&](std::size_t i, double t) { return std::exp(-curves[i].at(t)); }, ds, censoring,
                              grid);

  const fs::path dir = prepare_out(o.out_dir);
  nlohmann::json result = {{"dataset_id", ds.id}, {"cindex", mp.cindex}, {"brier", mp.brier}};
  write_text_file(dir / (ds.id + ".eval.json"), result.dump(2) + "\n");

  RunManifest m = base_manifest("eval", argv, dir);
  m.inputs = {o.data.string(), o.model.string()};
  if (!o.train.empty()) m.inputs.push_back(o.train.string());
  m.dataset_id = ds.id;
  m.feature_dim = ds.feature_dim();
  m.seed = forest.seed;
  m.status = "complete";
  save_manifest(dir / (ds.id + ".eval.manifest.json"), m);

  out << ds.id << ": cindex=" << text::format_double(mp.cindex) << " brier=" << text::format_double(mp.brier)
      << '\n';
}

void cmd_grid(const GridOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const SurvivalDataset ds = load_dataset(o.data, o.id);
  if (!fs::exists(o.grid_file)) throw std::runtime_error("no such file: " + o.grid_file.string());
  const GridSpec spec = load_grid_file(o.grid_file);
  if (o.k < 2) throw std::invalid_argument("--k must be at least 2");

  const fs::path dir = prepare_out(o.out_dir);
  const fs::path results = results_path(dir, ds.id);
  const fs::path mpath = manifest_path(dir, ds.id);

  RunManifest m = base_manifest("grid", argv, dir);
  m.inputs = {o.data.string()};
  m.grid_file = o.grid_file.string();
  m.dataset_id = ds.id;
  m.feature_dim = ds.feature_dim();
  m.k = o.k;
  m.seed = o.seed;
  m.workers = o.workers;
  m.grid = spec;
  m.reference = spec.defaults.resolve(ds.feature_dim());

  GridRunOptions run;
  run.k = o.k;
  run.seed = o.seed;
  run.workers = o.workers;
  if (o.resume && fs::exists(results)) {
    if (!fs::exists(mpath)) throw std::runtime_error("cannot resume: no manifest " + mpath.string());
    const RunManifest prev = load_manifest(mpath);
    if (prev.grid != m.grid || prev.k != m.k || prev.seed != m.seed || prev.dataset_id != m.dataset_id ||
        prev.reference != m.reference) {
      throw std::runtime_error("cannot resume: " + mpath.string() + " was written for a different grid, k, seed or dataset");
    }
    std::ifstream in(results, std::ios::binary);
    run.completed = read_results_csv(in, o.k, o.seed, results.string());
  }

  // Rewrite the committed prefix so a cut-off tail from an interrupted run is
  // gone before new rows are appended.
  {
    std::ofstream f(results, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + results.string());
    f << results_csv_header() << '\n';
    for (const auto& done : run.completed) write_outcome_rows(f, done);
  }
  std::ofstream sink(results, std::ios::binary | std::ios::app);
  if (!sink) throw std::runtime_error("cannot append to " + results.string());
  run.on_outcome = [&](const EvalOutcome& outcome) {
    write_outcome_rows(sink, outcome);
    sink.flush();
    if (!sink) throw std::runtime_error("error writing " + results.string());
  };

  m.status = "running";
  m.extra = {{"results", results.string()}};
  save_manifest(mpath, m);
  ResultsTable table;
  try {
    table = run_grid(ds, spec, run);
  } catch (...) {
    m.status = "failed";
    save_manifest(mpath, m);
    throw;
  }
  sink.close();
  m.status = "complete";
  save_manifest(mpath, m);

  const EvalOutcome& ref = table.reference_outcome();
  const EvalOutcome& best_c = best_outcome(table, RiskMetric::CIndex);
  const EvalOutcome& best_b = best_outcome(table, RiskMetric::Brier);
  out << ds.id << ": " << table.outcomes.size() << " configurations (" << run.completed.size()
      << " resumed), k=" << o.k << ", seed=" << o.seed << " -> " << results.string() << '\n'
      << "  default   cindex=" << fixed(ref.mean_cindex) << " brier=" << fixed(ref.mean_brier) << "  ("
      << describe(ref.params) << ")\n"
      << "  best C    cindex=" << fixed(best_c.mean_cindex) << "  (config " << best_c.config_id << ": "
      << describe(best_c.params) << ")\n"
      << "  best IBS  brier=" << fixed(best_b.mean_brier) << "  (config " << best_b.config_id << ": "
      << describe(best_b.params) << ")\n";
}

void cmd_tunability(const TunabilityOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.results.empty()) throw std::invalid_argument("no results files given");
  std::vector<RiskMetric> metrics;
  if (o.metric == "both") {
    metrics = {RiskMetric::CIndex, RiskMetric::Brier};
  } else {
    metrics = {parse_risk_metric(o.metric)};
  }

  std::vector<ResultsTable> tables;
  for (const auto& path : o.results) {
    if (!fs::exists(path)) throw std::runtime_error("no such file: " + path.string());
    tables.push_back(load_results_table(path));
  }
  std::vector<TunabilityReport> reports;
  for (RiskMetric metric : metrics) reports.push_back(build_report(tables, metric));

  const fs::path dir = prepare_out(o.out_dir);
  std::ostringstream model_csv, hp_csv, range_csv;
  write_model_csv(model_csv, reports);
  write_hyperparam_csv(hp_csv, reports);
  write_range_csv(range_csv, reports);
  write_text_file(dir / "tunability_model.csv", model_csv.str());
  write_text_file(dir / "tunability_hyperparam.csv", hp_csv.str());
  write_text_file(dir / "tunability_range.csv", range_csv.str());
  nlohmann::json doc = {{"tool_version", tool_version()}, {"reports", nlohmann::json::array()}};
  for (const auto& r : reports) doc["reports"].push_back(report_to_json(r));
  write_text_file(dir / "tunability_report.json", doc.dump(2) + "\n");

  RunManifest m = base_manifest("tunability", argv, dir);
  for (const auto& path : o.results) m.inputs.push_back(path.string());
  m.extra = {{"metric", o.metric}};
  m.status = "complete";
  save_manifest(dir / "tunability.manifest.json", m);

  // Console summary in metric units (C-index rather than 1 - C-index).
  for (const auto& r : reports) {
    const bool c = r.metric == RiskMetric::CIndex;
    const auto show = [&](double risk_value) { return fixed(c ? 1.0 - risk_value : risk_value); };
    out << (c ? "C-index" : "Integrated Brier") << '\n';
    out << "  dataset      default   best      d\n";
    for (const auto& t : r.datasets) {
      out << "  " << std::left << std::setw(12) << t.dataset_id << ' ' << show(t.default_risk) << "    "
          << show(t.best_risk) << "    " << fixed(t.d) << '\n';
    }
    out << "  " << std::left << std::setw(12) << "mean" << ' ' << show(r.default_risk_summary.mean) << "    "
        << show(r.best_risk_summary.mean) << "    " << fixed(r.d_summary.mean) << '\n';
  }
  out << "wrote tunability_model.csv, tunability_hyperparam.csv, tunability_range.csv, tunability_report.json to "
      << dir.string() << '\n';
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> recorded = args;
  CLI::App app{"Random survival forest training and hyperparameter tunability analysis", "rsftune"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a CMAPSS trajectory file into a survival dataset CSV");
  ingest_cmd->add_option("--input", ingest.input, "CMAPSS train_FD00x.txt file")->required();
  ingest_cmd->add_option("--id", ingest.id, "Dataset id")->required();
  ingest_cmd->add_option("--window", ingest.window, "Early-life cycles summarised per unit")->capture_default_str();
  ingest_cmd->add_option("--censor-quantile", ingest.censor_quantile,
                         "Administratively censor at this quantile of failure times");
  ingest_cmd->add_option("--out", ingest.out_dir, "Output directory");

  FitOptions fitopt;
  std::string mtry = "auto";
  auto* fit_cmd = app.add_subcommand("fit", "Train one forest and save it as JSON");
  fit_cmd->add_option("--data", fitopt.data, "Dataset CSV")->required();
  fit_cmd->add_option("--id", fitopt.id, "Dataset id (default: file stem)");
  fit_cmd->add_option("--ntree", fitopt.ntree)->capture_default_str();
  fit_cmd->add_option("--mtry", mtry, "Integer or auto (floor(sqrt(p)))")->capture_default_str();
  fit_cmd->add_option("--nodesize", fitopt.nodesize)->capture_default_str();
  fit_cmd->add_option("--nodedepth", fitopt.nodedepth, "Integer or none")->capture_default_str();
  fit_cmd->add_option("--splitrule", fitopt.splitrule, "logrank, logrankscore or bs.gradient")->capture_default_str();
  fit_cmd->add_option("--nsplit", fitopt.nsplit, "Random thresholds per feature; 0 tries every cut")
      ->capture_default_str();
  fit_cmd->add_option("--seed", fitopt.seed)->capture_default_str();
  fit_cmd->add_option("--workers", fitopt.workers)->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--model", fitopt.model, "Model output path (default: <out>/<id>.model.json)");
  fit_cmd->add_option("--out", fitopt.out_dir, "Output directory");

  EvalOptions evalopt;
  auto* eval_cmd = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval_cmd->add_option("--data", evalopt.data, "Dataset CSV")->required();
  eval_cmd->add_option("--id", evalopt.id, "Dataset id (default: file stem)");
  eval_cmd->add_option("--model", evalopt.model, "Model JSON")->required();
  eval_cmd->add_option("--train", evalopt.train, "Training dataset CSV for the censoring weights");
  eval_cmd->add_option("--out", evalopt.out_dir, "Output directory");

  GridOptions gridopt;
  auto* grid_cmd = app.add_subcommand("grid", "Cross-validate every configuration of a grid");
  grid_cmd->add_option("--data", gridopt.data, "Dataset CSV")->required();
  grid_cmd->add_option("--id", gridopt.id, "Dataset id (default: file stem)");
  grid_cmd->add_option("--grid", gridopt.grid_file, "Grid file")->required();
  grid_cmd->add_option("--k", gridopt.k, "Folds")->capture_default_str();
  grid_cmd->add_option("--seed", gridopt.seed)->capture_default_str();
  grid_cmd->add_option("--workers", gridopt.workers)->capture_default_str()->check(CLI::PositiveNumber);
  grid_cmd->add_flag("--resume", gridopt.resume, "Continue a partial results file");
  grid_cmd->add_option("--out", gridopt.out_dir, "Output directory");

  TunabilityOptions tunopt;
  auto* tun_cmd = app.add_subcommand("tunability", "Tunability measures from one or more results files");
  tun_cmd->add_option("--results", tunopt.results, "<id>.results.csv files (manifests must sit next to them)")
      ->required()
      ->expected(1, -1);
  tun_cmd->add_option("--metric", tunopt.metric, "cindex, brier or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"cindex", "brier", "both"}));
  tun_cmd->add_option("--out", tunopt.out_dir, "Output directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*ingest_cmd) {
      cmd_ingest(ingest, recorded, out);
    } else if (*fit_cmd) {
      if (mtry != "auto") {
        const auto v = text::parse_int(mtry);
        if (!v) throw std::invalid_argument("--mtry: expected an integer or auto, got '" + mtry + "'");
        fitopt.mtry = static_cast<int>(*v);
      }
      cmd_fit(fitopt, recorded, out);
    } else if (*eval_cmd) {
      cmd_eval(evalopt, recorded, out);
    } else if (*grid_cmd) {
      cmd_grid(gridopt, recorded, out);
    } else if (*tun_cmd) {
      cmd_tunability(tunopt, recorded, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rsftune::cli
