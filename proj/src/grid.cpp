#include "rsftune/grid.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rsftune/dataset.hpp"
#include "rsftune/text.hpp"

namespace rsftune {

HyperParams ReferenceConfig::resolve(std::size_t feature_dim) const {
  HyperParams p;
  p.ntree = ntree;
  p.mtry = mtry ? *mtry : default_mtry(feature_dim);
  p.nodesize = nodesize;
  p.nodedepth = nodedepth;
  p.splitrule = splitrule;
  p.nsplit = nsplit;
  p.validate();
  return p;
}

namespace {

template <typename T>
void check_list(const std::vector<T>& values, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string(name) + ": value list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (values[i] == values[j]) throw std::invalid_argument(std::string(name) + ": duplicate value");
    }
  }
}

void check_min(const std::vector<int>& values, int min, const char* name) {
  for (int v : values) {
    if (v < min) {
      throw std::invalid_argument(std::string(name) + ": value " + std::to_string(v) + " is below " +
                                  std::to_string(min));
    }
  }
}

template <typename T>
std::optional<std::size_t> position(const std::vector<T>& values, const T& v) {
  auto it = std::find(values.begin(), values.end(), v);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

}  // namespace

void GridSpec::validate() const {
  check_list(ntree_values, "ntree_values");
  check_list(mtry_values, "mtry_values");
  check_list(nodesize_values, "nodesize_values");
  check_list(nodedepth_values, "nodedepth_values");
  check_list(splitrule_values, "splitrule_values");
  check_list(nsplit_values, "nsplit_values");
  check_min(ntree_values, 1, "ntree_values");
  check_min(mtry_values, 1, "mtry_values");
  check_min(nodesize_values, 1, "nodesize_values");
  check_min(nsplit_values, 0, "nsplit_values");
  if (defaults.ntree < 1) throw std::invalid_argument("defaults.ntree: must be >= 1");
  if (defaults.mtry && *defaults.mtry < 1) throw std::invalid_argument("defaults.mtry: must be >= 1");
  if (defaults.nodesize < 1) throw std::invalid_argument("defaults.nodesize: must be >= 1");
  if (defaults.nsplit < 0) throw std::invalid_argument("defaults.nsplit: must be >= 0");
}

std::size_t GridSpec::value_count(Hyperparam h) const {
  switch (h) {
    case Hyperparam::NTree: return ntree_values.size();
    case Hyperparam::Mtry: return mtry_values.size();
    case Hyperparam::NodeSize: return nodesize_values.size();
    case Hyperparam::NodeDepth: return nodedepth_values.size();
    case Hyperparam::SplitRule: return splitrule_values.size();
    case Hyperparam::NSplit: return nsplit_values.size();
  }
  return 0;
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (Hyperparam h : kAllHyperparams) total *= value_count(h);
  return total;
}

std::vector<double> GridSpec::ordinals(Hyperparam h) const {
  std::vector<double> out;
  const std::size_t count = value_count(h);
  out.reserve(count);
  HyperParams probe;
  for (std::size_t i = 0; i < count; ++i) {
    switch (h) {
      case Hyperparam::NTree: probe.ntree = ntree_values[i]; break;
      case Hyperparam::Mtry: probe.mtry = mtry_values[i]; break;
      case Hyperparam::NodeSize: probe.nodesize = nodesize_values[i]; break;
      case Hyperparam::NodeDepth: probe.nodedepth = nodedepth_values[i]; break;
      case Hyperparam::SplitRule: probe.splitrule = splitrule_values[i]; break;
      case Hyperparam::NSplit: probe.nsplit = nsplit_values[i]; break;
    }
    out.push_back(ordinal(probe, h));
  }
  return out;
}

HyperParams config_at(const GridSpec& spec, std::size_t config_id) {
  if (config_id >= spec.size()) throw std::out_of_range("config_id outside the grid");
  std::size_t rest = config_id;
  const auto take = [&](std::size_t count) {
    const std::size_t pos = rest % count;
    rest /= count;
    return pos;
  };
  HyperParams p;
  p.nsplit = spec.nsplit_values[take(spec.nsplit_values.size())];
  p.splitrule = spec.splitrule_values[take(spec.splitrule_values.size())];
  p.nodedepth = spec.nodedepth_values[take(spec.nodedepth_values.size())];
  p.nodesize = spec.nodesize_values[take(spec.nodesize_values.size())];
  p.mtry = spec.mtry_values[take(spec.mtry_values.size())];
  p.ntree = spec.ntree_values[take(spec.ntree_values.size())];
  return p;
}

std::vector<HyperParams> enumerate_grid(const GridSpec& spec) {
  spec.validate();
  std::vector<HyperParams> out;
  out.reserve(spec.size());
  HyperParams p;
  for (int ntree : spec.ntree_values) {
    p.ntree = ntree;
    for (int mtry : spec.mtry_values) {
      p.mtry = mtry;
      for (int nodesize : spec.nodesize_values) {
        p.nodesize = nodesize;
        for (NodeDepth depth : spec.nodedepth_values) {
          p.nodedepth = depth;
          for (SplitRule rule : spec.splitrule_values) {
            p.splitrule = rule;
            for (int nsplit : spec.nsplit_values) {
              p.nsplit = nsplit;
              out.push_back(p);
            }
          }
        }
      }
    }
  }
  return out;
}

std::optional<std::size_t> config_index(const GridSpec& spec, const HyperParams& params) {
  const std::optional<std::size_t> pos[] = {
      position(spec.ntree_values, params.ntree),         position(spec.mtry_values, params.mtry),
      position(spec.nodesize_values, params.nodesize),   position(spec.nodedepth_values, params.nodedepth),
      position(spec.splitrule_values, params.splitrule), position(spec.nsplit_values, params.nsplit)};
  const std::size_t counts[] = {spec.ntree_values.size(),     spec.mtry_values.size(),
                                spec.nodesize_values.size(),  spec.nodedepth_values.size(),
                                spec.splitrule_values.size(), spec.nsplit_values.size()};
  std::size_t rank = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (!pos[i]) return std::nullopt;
    rank = rank * counts[i] + *pos[i];
  }
  return rank;
}

namespace {

int parse_int_value(std::string_view token, const std::string& key) {
  auto v = text::parse_int(token);
  if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(key + ": '" + std::string(token) + "' is not an integer");
  }
  return static_cast<int>(*v);
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view value, const std::string& key, Parse parse) {
  std::vector<T> out;
  for (auto token : text::split(value, ',')) {
    token = text::trim(token);
    if (token.empty()) throw std::invalid_argument(key + ": empty list entry");
    out.push_back(parse(token));
  }
  return out;
}

}  // namespace

GridSpec parse_grid_file(std::istream& in, const std::string& source_name) {
  GridSpec spec;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected 'key = value'");
    const std::string key(text::trim(view.substr(0, eq)));
    const std::string_view value = text::trim(view.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(source_name, line_no, "duplicate key '" + key + "'");

    try {
      const auto ints = [&] { return parse_list<int>(value, key, [&](auto t) { return parse_int_value(t, key); }); };
      if (key == "ntree_values") {
        spec.ntree_values = ints();
      } else if (key == "mtry_values") {
        spec.mtry_values = ints();
      } else if (key == "nodesize_values") {
        spec.nodesize_values = ints();
      } else if (key == "nodedepth_values") {
        spec.nodedepth_values = parse_list<NodeDepth>(value, key, [](auto t) { return NodeDepth::parse(t); });
      } else if (key == "splitrule_values") {
        spec.splitrule_values = parse_list<SplitRule>(value, key, [](auto t) { return parse_split_rule(t); });
      } else if (key == "nsplit_values") {
        spec.nsplit_values = ints();
      } else if (key == "defaults.ntree") {
        spec.defaults.ntree = parse_int_value(value, key);
      } else if (key == "defaults.mtry") {
        if (value == "auto") {
          spec.defaults.mtry.reset();
        } else {
          spec.defaults.mtry = parse_int_value(value, key);
        }
      } else if (key == "defaults.nodesize") {
        spec.defaults.nodesize = parse_int_value(value, key);
      } else if (key == "defaults.nodedepth") {
        spec.defaults.nodedepth = NodeDepth::parse(value);
      } else if (key == "defaults.splitrule") {
        spec.defaults.splitrule = parse_split_rule(value);
      } else if (key == "defaults.nsplit") {
        spec.defaults.nsplit = parse_int_value(value, key);
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source_name, line_no, "key '" + key + "': " + e.what());
    }
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ParseError(source_name, 0, std::string("invalid grid: ") + e.what());
  }
  return spec;
}

GridSpec load_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file '" + path.string() + "'");
  return parse_grid_file(in, path.string());
}

namespace {

template <typename T, typename Fmt>
std::string join(const std::vector<T>& values, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

std::string int_str(int v) { return std::to_string(v); }

}  // namespace

std::string format_grid_file(const GridSpec& spec) {
  std::ostringstream out;
  out << "ntree_values = " << join(spec.ntree_values, int_str) << '\n'
      << "mtry_values = " << join(spec.mtry_values, int_str) << '\n'
      << "nodesize_values = " << join(spec.nodesize_values, int_str) << '\n'
      << "nodedepth_values = " << join(spec.nodedepth_values, [](NodeDepth d) { return d.to_string(); }) << '\n'
      << "splitrule_values = "
      << join(spec.splitrule_values, [](SplitRule r) { return std::string(to_string(r)); }) << '\n'
      << "nsplit_values = " << join(spec.nsplit_values, int_str) << '\n'
      << "defaults.ntree = " << spec.defaults.ntree << '\n'
      << "defaults.mtry = " << (spec.defaults.mtry ? std::to_string(*spec.defaults.mtry) : "auto") << '\n'
      << "defaults.nodesize = " << spec.defaults.nodesize << '\n'
      << "defaults.nodedepth = " << spec.defaults.nodedepth.to_string() << '\n'
      << "defaults.splitrule = " << to_string(spec.defaults.splitrule) << '\n'
      << "defaults.nsplit = " << spec.defaults.nsplit << '\n';
  return out.str();
}

nlohmann::json grid_to_json(const GridSpec& spec) {
  nlohmann::json j;
  j["ntree_values"] = spec.ntree_values;
  j["mtry_values"] = spec.mtry_values;
  j["nodesize_values"] = spec.nodesize_values;
  auto& depths = j["nodedepth_values"] = nlohmann::json::array();
  for (NodeDepth d : spec.nodedepth_values) depths.push_back(d.to_string());
  auto& rules = j["splitrule_values"] = nlohmann::json::array();
  for (SplitRule r : spec.splitrule_values) rules.push_back(std::string(to_string(r)));
  j["nsplit_values"] = spec.nsplit_values;
  nlohmann::json d;
  d["ntree"] = spec.defaults.ntree;
  d["mtry"] = spec.defaults.mtry ? nlohmann::json(*spec.defaults.mtry) : nlohmann::json("auto");
  d["nodesize"] = spec.defaults.nodesize;
  d["nodedepth"] = spec.defaults.nodedepth.to_string();
  d["splitrule"] = std::string(to_string(spec.defaults.splitrule));
  d["nsplit"] = spec.defaults.nsplit;
  j["defaults"] = std::move(d);
  return j;
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec spec;
  spec.ntree_values = j.at("ntree_values").get<std::vector<int>>();
  spec.mtry_values = j.at("mtry_values").get<std::vector<int>>();
  spec.nodesize_values = j.at("nodesize_values").get<std::vector<int>>();
  for (const auto& d : j.at("nodedepth_values")) spec.nodedepth_values.push_back(NodeDepth::parse(d.get<std::string>()));
  for (const auto& r : j.at("splitrule_values")) spec.splitrule_values.push_back(parse_split_rule(r.get<std::string>()));
  spec.nsplit_values = j.at("nsplit_values").get<std::vector<int>>();
  const auto& d = j.at("defaults");
  spec.defaults.ntree = d.at("ntree").get<int>();
  if (d.at("mtry").is_string()) {
    spec.defaults.mtry.reset();
  } else {
    spec.defaults.mtry = d.at("mtry").get<int>();
  }
  spec.defaults.nodesize = d.at("nodesize").get<int>();
  spec.defaults.nodedepth = NodeDepth::parse(d.at("nodedepth").get<std::string>());
  spec.defaults.splitrule = parse_split_rule(d.at("splitrule").get<std::string>());
  spec.defaults.nsplit = d.at("nsplit").get<int>();
  spec.validate();
  return spec;
}

}  // namespace rsftune
