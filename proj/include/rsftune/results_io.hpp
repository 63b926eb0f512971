#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsftune/grid.hpp"
#include "rsftune/tuner.hpp"

namespace rsftune {

/// Everything needed to re-run a command. Serialised without timestamps so a
/// rerun reproduces the manifest too.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::string grid_file;
  std::string output_dir;
  std::string dataset_id;
  std::size_t feature_dim = 0;
  int k = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<GridSpec> grid;
  std::optional<HyperParams> reference;
  std::string status;  // "running", "complete" or "failed"
  std::string tool_version;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest load_manifest(const std::filesystem::path& path);

std::string tool_version();

// Results CSV: one row per (configuration, fold), outcomes in plan order.
//   dataset_id,config_id,ntree,mtry,nodesize,nodedepth,splitrule,nsplit,fold,cindex,brier
std::string results_csv_header();
void write_outcome_rows(std::ostream& out, const EvalOutcome& outcome);
void write_results_csv(std::ostream& out, const ResultsTable& table);

/// Reads the complete outcomes of a results file. A trailing outcome with
/// fewer than k rows, or a final line without its newline, is what an
/// interrupted run leaves behind and is dropped; any other inconsistency
/// throws ParseError.
std::vector<EvalOutcome> read_results_csv(std::istream& in, int k, std::uint64_t seed,
                                          const std::string& source_name = "<results>");

/// Conventional file names inside an output directory.
std::filesystem::path results_path(const std::filesystem::path& dir, const std::string& dataset_id);
std::filesystem::path manifest_path(const std::filesystem::path& dir, const std::string& dataset_id);
/// The manifest that sits next to a results file: "<x>.results.csv" pairs
/// with "<x>.manifest.json"; any other name with the same stem.
std::filesystem::path manifest_for_results(const std::filesystem::path& results_csv);

/// Results file plus its sibling grid manifest, as one table.
ResultsTable load_results_table(const std::filesystem::path& results_csv);

}  // namespace rsftune
