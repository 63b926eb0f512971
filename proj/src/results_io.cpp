#include "rsftune/results_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rsftune/model_io.hpp"
#include "rsftune/text.hpp"

#ifndef RSFTUNE_VERSION
#define RSFTUNE_VERSION "0.0.0"
#endif

namespace rsftune {

using nlohmann::json;

std::string tool_version() { return RSFTUNE_VERSION; }

json manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["inputs"] = m.inputs;
  j["grid_file"] = m.grid_file;
  j["output_dir"] = m.output_dir;
  j["dataset_id"] = m.dataset_id;
  j["feature_dim"] = m.feature_dim;
  j["k"] = m.k;
  j["seed"] = m.seed;
  j["workers"] = m.workers;
  j["grid"] = m.grid ? grid_to_json(*m.grid) : json(nullptr);
  j["defaults"] = m.reference ? params_to_json(*m.reference) : json(nullptr);
  j["status"] = m.status;
  j["tool_version"] = m.tool_version;
  j["extra"] = m.extra;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.command = j.value("command", "");
  m.argv = j.value("argv", std::vector<std::string>{});
  m.inputs = j.value("inputs", std::vector<std::string>{});
  m.grid_file = j.value("grid_file", "");
  m.output_dir = j.value("output_dir", "");
  m.dataset_id = j.value("dataset_id", "");
  m.feature_dim = j.value("feature_dim", std::size_t{0});
  m.k = j.value("k", 0);
  m.seed = j.value("seed", std::uint64_t{0});
  m.workers = j.value("workers", 1);
  if (j.contains("grid") && !j.at("grid").is_null()) m.grid = grid_from_json(j.at("grid"));
  if (j.contains("defaults") && !j.at("defaults").is_null()) m.reference = params_from_json(j.at("defaults"));
  m.status = j.value("status", "");
  m.tool_version = j.value("tool_version", "");
  if (j.contains("extra")) m.extra = j.at("extra");
  return m;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
  if (!out) throw std::runtime_error("error writing " + path.string());
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
}

std::string results_csv_header() {
  return "dataset_id,config_id,ntree,mtry,nodesize,nodedepth,splitrule,nsplit,fold,cindex,brier";
}

void write_outcome_rows(std::ostream& out, const EvalOutcome& o) {
  const HyperParams& p = o.params;
  for (std::size_t f = 0; f < o.per_fold.size(); ++f) {
    out << o.dataset_id << ',' << o.config_id << ',' << p.ntree << ',' << p.mtry << ',' << p.nodesize << ','
        << p.nodedepth.to_string() << ',' << to_string(p.splitrule) << ',' << p.nsplit << ',' << f << ','
        << text::format_double(o.per_fold[f].cindex) << ',' << text::format_double(o.per_fold[f].brier) << '\n';
  }
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << results_csv_header() << '\n';
  for (const auto& o : table.outcomes) write_outcome_rows(out, o);
}

namespace {

struct Row {
  std::string dataset_id;
  std::size_t config_id = 0;
  HyperParams params;
  std::size_t fold = 0;
  MetricPair metrics;
};

Row parse_row(std::string_view line, const std::string& source, std::size_t line_no) {
  const auto fields = text::split(line, ',');
  if (fields.size() != 11) {
    throw ParseError(source, line_no, "expected 11 fields, found " + std::to_string(fields.size()));
  }
  const auto need_uint = [&](std::size_t i, const char* name) {
    const auto v = text::parse_uint(fields[i]);
    if (!v) throw ParseError(source, line_no, std::string(name) + ": '" + std::string(fields[i]) + "' is not a count");
    return *v;
  };
  const auto need_double = [&](std::size_t i, const char* name) {
    const auto v = text::parse_double(fields[i]);
    if (!v) throw ParseError(source, line_no, std::string(name) + ": '" + std::string(fields[i]) + "' is not a number");
    return *v;
  };

  Row r;
  r.dataset_id = std::string(fields[0]);
  r.config_id = need_uint(1, "config_id");
  r.params.ntree = static_cast<int>(need_uint(2, "ntree"));
  r.params.mtry = static_cast<int>(need_uint(3, "mtry"));
  r.params.nodesize = static_cast<int>(need_uint(4, "nodesize"));
  r.params.nsplit = static_cast<int>(need_uint(7, "nsplit"));
  try {
    r.params.nodedepth = NodeDepth::parse(fields[5]);
    r.params.splitrule = parse_split_rule(fields[6]);
    r.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, line_no, e.what());
  }
  r.fold = need_uint(8, "fold");
  r.metrics.cindex = need_double(9, "cindex");
  r.metrics.brier = need_double(10, "brier");
  return r;
}

}  // namespace

std::vector<EvalOutcome> read_results_csv(std::istream& in, int k, std::uint64_t seed, const std::string& source) {
  if (k < 1) throw std::invalid_argument("read_results_csv: k must be positive");
  const auto folds = static_cast<std::size_t>(k);
  std::vector<EvalOutcome> outcomes;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return outcomes;  // empty file: nothing committed yet
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != results_csv_header()) throw ParseError(source, 1, "unexpected results header");

  EvalOutcome current;
  bool open = false;
  while (std::getline(in, line)) {
    ++line_no;
    // A final line without its newline was cut off mid-write.
    if (in.eof()) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Row row = parse_row(line, source, line_no);
    if (open && row.config_id != current.config_id) {
      throw ParseError(source, line_no, "config " + std::to_string(current.config_id) + " has only " +
                                            std::to_string(current.per_fold.size()) + " of " +
                                            std::to_string(k) + " fold rows");
    }
    if (!open) {
      for (const auto& done : outcomes) {
        if (done.config_id == row.config_id) {
          throw ParseError(source, line_no, "config " + std::to_string(row.config_id) + " appears twice");
        }
      }
      current = EvalOutcome{};
      current.dataset_id = row.dataset_id;
      current.config_id = row.config_id;
      current.params = row.params;
      current.seed = seed;
      open = true;
    } else if (!(row.params == current.params) || row.dataset_id != current.dataset_id) {
      throw ParseError(source, line_no, "fold rows of config " + std::to_string(row.config_id) + " disagree");
    }
    if (row.fold != current.per_fold.size()) {
      throw ParseError(source, line_no, "expected fold " + std::to_string(current.per_fold.size()));
    }
    current.per_fold.push_back(row.metrics);
    if (current.per_fold.size() == folds) {
      current.update_means();
      outcomes.push_back(std::move(current));
      open = false;
    }
  }
  return outcomes;
}

std::filesystem::path results_path(const std::filesystem::path& dir, const std::string& dataset_id) {
  return dir / (dataset_id + ".results.csv");
}

std::filesystem::path manifest_path(const std::filesystem::path& dir, const std::string& dataset_id) {
  return dir / (dataset_id + ".manifest.json");
}

std::filesystem::path manifest_for_results(const std::filesystem::path& results_csv) {
  const std::string name = results_csv.filename().string();
  const std::string suffix = ".results.csv";
  if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return results_csv.parent_path() / (name.substr(0, name.size() - suffix.size()) + ".manifest.json");
  }
  auto p = results_csv;
  return p.replace_extension(".manifest.json");
}

ResultsTable load_results_table(const std::filesystem::path& results_csv) {
  const auto mpath = manifest_for_results(results_csv);
  if (!std::filesystem::exists(mpath)) {
    throw std::runtime_error("no manifest " + mpath.string() + " next to " + results_csv.string());
  }
  const RunManifest m = load_manifest(mpath);
  if (!m.grid || !m.reference) throw std::runtime_error("manifest " + mpath.string() + " has no grid section");

  std::ifstream in(results_csv, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + results_csv.string());
  ResultsTable table;
  table.dataset_id = m.dataset_id;
  table.grid = *m.grid;
  table.reference = *m.reference;
  table.k = m.k;
  table.seed = m.seed;
  table.outcomes = read_results_csv(in, m.k, m.seed, results_csv.string());
  for (const auto& o : table.outcomes) {
    if (o.dataset_id != table.dataset_id) {
      throw std::runtime_error(results_csv.string() + ": row for dataset '" + o.dataset_id + "' but manifest says '" +
                               table.dataset_id + "'");
    }
  }
  return table;
}

}  // namespace rsftune
