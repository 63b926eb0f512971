#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsftune {

/// One unit: features, observed time (cycles) and event flag (1 = failure).
struct SurvivalRecord {
  int unit_id = 0;
  std::vector<double> features;
  double time = 0.0;
  int event = 1;
};

struct SurvivalDataset {
  std::string id;
  std::vector<std::string> feature_names;
  std::vector<SurvivalRecord> records;

  std::size_t size() const { return records.size(); }
  std::size_t feature_dim() const { return feature_names.size(); }
  std::size_t event_count() const;

  std::vector<double> times() const;
  std::vector<int> events() const;

  /// Checks record invariants (positive time, binary event, consistent
  /// dimension, finite features). With `require_event`, also that at least one
  /// failure is present.
  void validate(bool require_event = true) const;
};

/// Input error carrying a 1-based line number (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr int kDefaultWindow = 30;
inline constexpr std::size_t kCmapssColumns = 26;
inline constexpr std::size_t kCmapssSettings = 3;
inline constexpr std::size_t kCmapssSensors = 21;

/// Feature names in column order: three setting means, then mean and slope per
/// sensor (45 in total).
std::vector<std::string> cmapss_feature_names();

/// Reads a CMAPSS trajectory file (unit, cycle, 3 settings, 21 sensors per
/// row) and summarises each unit over its first min(window, lifetime) cycles.
/// Every unit becomes one record with time = last cycle and event = 1.
SurvivalDataset ingest_cmapss(const std::filesystem::path& path, std::string dataset_id,
                              int window = kDefaultWindow);
SurvivalDataset ingest_cmapss(std::istream& in, std::string dataset_id, int window,
                              const std::string& source_name);

/// Administrative censoring at the empirical `quantile` of observed times:
/// records beyond the cut become (cut, censored).
SurvivalDataset apply_censoring(const SurvivalDataset& ds, double quantile);

struct FoldAssignment {
  int k = 0;
  std::vector<int> assignment;  // fold index per record

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Event-stratified k-fold split; a pure function of (ds.id, record order, k,
/// seed).
FoldAssignment make_folds(const SurvivalDataset& ds, int k, std::uint64_t seed);

SurvivalDataset subset(const SurvivalDataset& ds, std::span<const std::size_t> indices);

/// Canonical dump: header unit_id,time,event,f_0,...,f_{p-1}.
void write_dataset_csv(std::ostream& out, const SurvivalDataset& ds);
void write_dataset_csv(const std::filesystem::path& path, const SurvivalDataset& ds);
SurvivalDataset read_dataset_csv(std::istream& in, std::string dataset_id,
                                 const std::string& source_name = "<stream>");
SurvivalDataset read_dataset_csv(const std::filesystem::path& path, std::string dataset_id);

}  // namespace rsftune
