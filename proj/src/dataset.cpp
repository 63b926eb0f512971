#include "rsftune/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "rsftune/random.hpp"
#include "rsftune/text.hpp"

namespace rsftune {

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& what) {
  if (line == 0) return source + ": " + what;
  return source + ":" + std::to_string(line) + ": " + what;
}

struct CmapssRow {
  std::size_t line = 0;
  int cycle = 0;
  std::array<double, kCmapssColumns - 2> values{};
};

// Least-squares slope of y against 1..w. Symmetric pairs are combined first so
// a constant signal gives exactly zero.
double ls_slope(std::span<const double> y) {
  const std::size_t w = y.size();
  if (w < 2) return 0.0;
  const double center = (static_cast<double>(w) + 1.0) / 2.0;
  double num = 0.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < w / 2; ++j) {
    const std::size_t hi = w - 1 - j;
    const double offset = static_cast<double>(hi + 1) - center;
    num += offset * (y[hi] - y[j]);
    sxx += 2.0 * offset * offset;
  }
  return num / sxx;
}

}  // namespace

std::size_t SurvivalDataset::event_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const SurvivalRecord& r) { return r.event == 1; }));
}

std::vector<double> SurvivalDataset::times() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.time);
  return t;
}

std::vector<int> SurvivalDataset::events() const {
  std::vector<int> e;
  e.reserve(records.size());
  for (const auto& r : records) e.push_back(r.event);
  return e;
}

void SurvivalDataset::validate(bool require_event) const {
  const std::size_t p = feature_dim();
  for (const auto& r : records) {
    const std::string who = "dataset " + id + ", unit " + std::to_string(r.unit_id);
    if (!(r.time > 0.0) || !std::isfinite(r.time)) throw std::invalid_argument(who + ": time must be positive");
    if (r.event != 0 && r.event != 1) throw std::invalid_argument(who + ": event must be 0 or 1");
    if (r.features.size() != p) {
      throw std::invalid_argument(who + ": expected " + std::to_string(p) + " features, got " +
                                  std::to_string(r.features.size()));
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) throw std::invalid_argument(who + ": non-finite feature value");
    }
  }
  if (require_event && event_count() == 0) {
    throw std::invalid_argument("dataset " + id + " has no observed events");
  }
}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(located(source, line, what)), line_(line) {}

std::vector<std::string> cmapss_feature_names() {
  std::vector<std::string> names;
  for (std::size_t s = 1; s <= kCmapssSettings; ++s) names.push_back("setting_" + std::to_string(s) + "_mean");
  for (std::size_t s = 1; s <= kCmapssSensors; ++s) {
    names.push_back("sensor_" + std::to_string(s) + "_mean");
    names.push_back("sensor_" + std::to_string(s) + "_slope");
  }
  return names;
}

SurvivalDataset ingest_cmapss(const std::filesystem::path& path, std::string dataset_id, int window) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CMAPSS file '" + path.string() + "'");
  return ingest_cmapss(in, std::move(dataset_id), window, path.string());
}

SurvivalDataset ingest_cmapss(std::istream& in, std::string dataset_id, int window,
                              const std::string& source_name) {
  if (window < 1) throw std::invalid_argument("window must be a positive integer");

  // Rows grouped per unit; records come out sorted by unit id.
  std::map<int, std::vector<CmapssRow>> units;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = text::split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != kCmapssColumns) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(kCmapssColumns) + " columns, found " +
                           std::to_string(tokens.size()));
    }
    CmapssRow row;
    row.line = line_no;
    long long ids[2];
    for (std::size_t c = 0; c < 2; ++c) {
      // Unit and cycle are written as integers, but tolerate "1.0".
      auto v = text::parse_double(tokens[c]);
      if (!v || *v != std::floor(*v) || *v < 1 || *v > 1e9) {
        throw ParseError(source_name, line_no,
                         "invalid " + std::string(c == 0 ? "unit" : "cycle") + " value '" +
                             std::string(tokens[c]) + "'");
      }
      ids[c] = static_cast<long long>(*v);
    }
    row.cycle = static_cast<int>(ids[1]);
    for (std::size_t c = 2; c < kCmapssColumns; ++c) {
      auto v = text::parse_double(tokens[c]);
      if (!v) {
        throw ParseError(source_name, line_no,
                         "non-numeric token '" + std::string(tokens[c]) + "' in column " + std::to_string(c + 1));
      }
      row.values[c - 2] = *v;
    }
    auto& unit_rows = units[static_cast<int>(ids[0])];
    const int expected = static_cast<int>(unit_rows.size()) + 1;
    if (row.cycle != expected) {
      throw ParseError(source_name, line_no,
                       "unit " + std::to_string(ids[0]) + ": expected cycle " + std::to_string(expected) +
                           ", found " + std::to_string(row.cycle));
    }
    unit_rows.push_back(row);
    ++rows;
  }
  if (rows == 0) throw ParseError(source_name, 0, "empty CMAPSS file");

  SurvivalDataset ds;
  ds.id = std::move(dataset_id);
  ds.feature_names = cmapss_feature_names();
  ds.records.reserve(units.size());
  std::vector<double> signal;
  for (const auto& [unit, unit_rows] : units) {
    if (unit_rows.size() < 2) {
      throw ParseError(source_name, unit_rows.front().line,
                       "unit " + std::to_string(unit) + " has fewer than 2 cycles");
    }
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), unit_rows.size());
    SurvivalRecord rec;
    rec.unit_id = unit;
    rec.time = static_cast<double>(unit_rows.back().cycle);
    rec.event = 1;
    rec.features.reserve(ds.feature_names.size());
    signal.resize(w);
    const auto column = [&](std::size_t c) {
      for (std::size_t i = 0; i < w; ++i) signal[i] = unit_rows[i].values[c];
      return std::span<const double>(signal);
    };
    const auto mean = [](std::span<const double> y) {
      return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    };
    for (std::size_t s = 0; s < kCmapssSettings; ++s) rec.features.push_back(mean(column(s)));
    for (std::size_t s = 0; s < kCmapssSensors; ++s) {
      auto y = column(kCmapssSettings + s);
      rec.features.push_back(mean(y));
      rec.features.push_back(ls_slope(y));
    }
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

SurvivalDataset apply_censoring(const SurvivalDataset& ds, double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("censoring quantile must lie in (0, 1]");
  }
  if (ds.records.empty()) return ds;
  std::vector<double> t = ds.times();
  std::sort(t.begin(), t.end());
  // Inverse of the empirical CDF: smallest time with F(t) >= quantile.
  const auto n = static_cast<double>(t.size());
  auto rank = static_cast<std::size_t>(std::ceil(quantile * n - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, t.size());
  const double cut = t[rank - 1];

  SurvivalDataset out = ds;
  for (auto& r : out.records) {
    if (r.time > cut) {
      r.time = cut;
      r.event = 0;
    }
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : assignment) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldAssignment make_folds(const SurvivalDataset& ds, int k, std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (k < 2) throw std::invalid_argument("number of folds must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("number of folds (" + std::to_string(k) + ") exceeds record count (" +
                                std::to_string(n) + ")");
  }

  // Event records first, then censored; each stratum ordered by unit id and
  // shuffled, then dealt round-robin so that both fold sizes and per-fold event
  // counts are balanced to within one.
  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < n; ++i) strata[ds.records[i].event == 1 ? 0 : 1].push_back(i);

  Rng rng(derive_seed({hash_string(ds.id), seed, static_cast<std::uint64_t>(k), n}));
  std::vector<std::size_t> order;
  order.reserve(n);
  for (auto& stratum : strata) {
    std::stable_sort(stratum.begin(), stratum.end(), [&](std::size_t a, std::size_t b) {
      return ds.records[a].unit_id < ds.records[b].unit_id;
    });
    for (std::size_t i = stratum.size(); i > 1; --i) std::swap(stratum[i - 1], stratum[rng.below(i)]);
    order.insert(order.end(), stratum.begin(), stratum.end());
  }

  FoldAssignment folds;
  folds.k = k;
  folds.assignment.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    folds.assignment[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

SurvivalDataset subset(const SurvivalDataset& ds, std::span<const std::size_t> indices) {
  SurvivalDataset out;
  out.id = ds.id;
  out.feature_names = ds.feature_names;
  out.records.reserve(indices.size());
  for (std::size_t i : indices) out.records.push_back(ds.records.at(i));
  return out;
}

void write_dataset_csv(std::ostream& out, const SurvivalDataset& ds) {
  out << "unit_id,time,event";
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) out << ",f_" << j;
  out << '\n';
  for (const auto& r : ds.records) {
    out << r.unit_id << ',' << text::format_double(r.time) << ',' << r.event;
    for (double v : r.features) out << ',' << text::format_double(v);
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const SurvivalDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_dataset_csv(out, ds);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

SurvivalDataset read_dataset_csv(std::istream& in, std::string dataset_id, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 0, "empty dataset file");
  const auto header = text::split(text::trim(line), ',');
  if (header.size() < 3 || header[0] != "unit_id" || header[1] != "time" || header[2] != "event") {
    throw ParseError(source_name, 1, "header must start with unit_id,time,event");
  }
  SurvivalDataset ds;
  ds.id = std::move(dataset_id);
  for (std::size_t j = 3; j < header.size(); ++j) ds.feature_names.emplace_back(text::trim(header[j]));

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::trim(line);
    if (row.empty()) continue;
    const auto cells = text::split(row, ',');
    if (cells.size() != header.size()) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    SurvivalRecord r;
    const auto unit = text::parse_int(cells[0]);
    const auto time = text::parse_double(cells[1]);
    const auto event = text::parse_int(cells[2]);
    if (!unit || !time || !event) throw ParseError(source_name, line_no, "malformed unit_id/time/event");
    if (!(*time > 0.0)) throw ParseError(source_name, line_no, "time must be positive");
    if (*event != 0 && *event != 1) throw ParseError(source_name, line_no, "event must be 0 or 1");
    r.unit_id = static_cast<int>(*unit);
    r.time = *time;
    r.event = static_cast<int>(*event);
    r.features.reserve(ds.feature_names.size());
    for (std::size_t j = 3; j < cells.size(); ++j) {
      const auto v = text::parse_double(cells[j]);
      if (!v) throw ParseError(source_name, line_no, "non-numeric feature in column " + std::to_string(j + 1));
      r.features.push_back(*v);
    }
    ds.records.push_back(std::move(r));
  }
  if (ds.records.empty()) throw ParseError(source_name, 0, "dataset file has no records");
  ds.validate(false);
  return ds;
}

SurvivalDataset read_dataset_csv(const std::filesystem::path& path, std::string dataset_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
  return read_dataset_csv(in, std::move(dataset_id), path.string());
}

}  // namespace rsftune
