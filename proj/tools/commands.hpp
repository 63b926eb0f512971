#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsftune/hyperparams.hpp"

namespace rsftune::cli {

/// Output directory used when --out is not given: $RSFTUNE_OUT, else "out".
std::filesystem::path default_output_dir();

struct IngestOptions {
  std::filesystem::path input;
  std::string id;
  int window = 30;
  std::optional<double> censor_quantile;
  std::filesystem::path out_dir;
};

struct FitOptions {
  std::filesystem::path data;
  std::string id;  // empty: file stem
  int ntree = 500;
  std::optional<int> mtry;  // empty: floor(sqrt(p))
  int nodesize = 15;
  std::string nodedepth = "none";
  std::string splitrule = "logrank";
  int nsplit = 10;
  std::uint64_t seed = 42;
  int workers = 1;
  std::filesystem::path model;  // empty: <out>/<id>.model.json
  std::filesystem::path out_dir;
};

struct EvalOptions {
  std::filesystem::path data;
  std::string id;
  std::filesystem::path model;
  std::filesystem::path train;  // optional source of the censoring curve
  std::filesystem::path out_dir;
};

struct GridOptions {
  std::filesystem::path data;
  std::string id;
  std::filesystem::path grid_file;
  int k = 5;
  std::uint64_t seed = 42;
  int workers = 1;
  bool resume = false;
  std::filesystem::path out_dir;
};

struct TunabilityOptions {
  std::vector<std::filesystem::path> results;
  std::string metric = "both";  // cindex, brier or both
  std::filesystem::path out_dir;
};

// Each command writes its outputs plus a manifest into out_dir, prints a short
// summary to `out`, and throws on failure. `argv` is recorded verbatim in the
// manifest.
void cmd_ingest(const IngestOptions& o, const std::vector<std::string>& argv, std::ostream& out);
void cmd_fit(const FitOptions& o, const std::vector<std::string>& argv, std::ostream& out);
void cmd_eval(const EvalOptions& o, const std::vector<std::string>& argv, std::ostream& out);
void cmd_grid(const GridOptions& o, const std::vector<std::string>& argv, std::ostream& out);
void cmd_tunability(const TunabilityOptions& o, const std::vector<std::string>& argv, std::ostream& out);

/// Full command line (without the program name). Returns the exit status;
/// errors go to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rsftune::cli
