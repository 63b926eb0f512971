#include "rsftune/hyperparams.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsftune/text.hpp"

namespace rsftune {

std::string_view to_string(SplitRule rule) {
  switch (rule) {
    case SplitRule::LogRank: return "logrank";
    case SplitRule::LogRankScore: return "logrankscore";
    case SplitRule::BsGradient: return "bs.gradient";
  }
  return "?";
}

SplitRule parse_split_rule(std::string_view s) {
  s = text::trim(s);
  if (s == "logrank") return SplitRule::LogRank;
  if (s == "logrankscore") return SplitRule::LogRankScore;
  if (s == "bs.gradient") return SplitRule::BsGradient;
  throw std::invalid_argument("unknown split rule '" + std::string(s) + "'");
}

int split_rule_code(SplitRule rule) {
  switch (rule) {
    case SplitRule::BsGradient: return 1;
    case SplitRule::LogRank: return 2;
    case SplitRule::LogRankScore: return 3;
  }
  return 0;
}

SplitRule split_rule_from_code(int code) {
  switch (code) {
    case 1: return SplitRule::BsGradient;
    case 2: return SplitRule::LogRank;
    case 3: return SplitRule::LogRankScore;
    default: throw std::invalid_argument("invalid split rule code " + std::to_string(code));
  }
}

NodeDepth NodeDepth::limited(int depth) {
  if (depth < 1) throw std::invalid_argument("nodedepth must be >= 1, got " + std::to_string(depth));
  NodeDepth d;
  d.limit_ = depth;
  return d;
}

NodeDepth NodeDepth::parse(std::string_view s) {
  s = text::trim(s);
  if (s == "none") return unlimited();
  auto v = text::parse_int(s);
  if (!v || *v < 1 || *v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("invalid nodedepth '" + std::string(s) + "'");
  }
  return limited(static_cast<int>(*v));
}

int NodeDepth::value() const {
  if (is_unlimited()) throw std::logic_error("nodedepth is unlimited");
  return limit_;
}

std::string NodeDepth::to_string() const { return is_unlimited() ? "none" : std::to_string(limit_); }

void HyperParams::validate() const {
  if (ntree < 1) throw std::invalid_argument("ntree must be >= 1");
  if (mtry < 1) throw std::invalid_argument("mtry must be >= 1");
  if (nodesize < 1) throw std::invalid_argument("nodesize must be >= 1");
  if (nsplit < 0) throw std::invalid_argument("nsplit must be >= 0");
}

int default_mtry(std::size_t feature_dim) {
  const auto m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(feature_dim))));
  return m < 1 ? 1 : m;
}

HyperParams default_params(std::size_t feature_dim) {
  HyperParams p;
  p.ntree = 500;
  p.mtry = default_mtry(feature_dim);
  p.nodesize = 15;
  p.nodedepth = NodeDepth::unlimited();
  p.splitrule = SplitRule::LogRank;
  p.nsplit = 10;
  return p;
}

std::string describe(const HyperParams& p) {
  return "ntree=" + std::to_string(p.ntree) + " mtry=" + std::to_string(p.mtry) +
         " nodesize=" + std::to_string(p.nodesize) + " nodedepth=" + p.nodedepth.to_string() +
         " splitrule=" + std::string(to_string(p.splitrule)) + " nsplit=" + std::to_string(p.nsplit);
}

std::string_view to_string(Hyperparam h) {
  switch (h) {
    case Hyperparam::NTree: return "ntree";
    case Hyperparam::Mtry: return "mtry";
    case Hyperparam::NodeSize: return "nodesize";
    case Hyperparam::NodeDepth: return "nodedepth";
    case Hyperparam::SplitRule: return "splitrule";
    case Hyperparam::NSplit: return "nsplit";
  }
  return "?";
}

Hyperparam parse_hyperparam(std::string_view s) {
  for (Hyperparam h : kAllHyperparams) {
    if (to_string(h) == s) return h;
  }
  throw std::invalid_argument("unknown hyperparameter '" + std::string(s) + "'");
}

double ordinal(const HyperParams& p, Hyperparam h) {
  switch (h) {
    case Hyperparam::NTree: return p.ntree;
    case Hyperparam::Mtry: return p.mtry;
    case Hyperparam::NodeSize: return p.nodesize;
    case Hyperparam::NodeDepth:
      return p.nodedepth.is_unlimited() ? std::numeric_limits<double>::infinity() : p.nodedepth.value();
    case Hyperparam::SplitRule: return split_rule_code(p.splitrule);
    case Hyperparam::NSplit: return p.nsplit;
  }
  return 0.0;
}

HyperParams with_ordinal(HyperParams p, Hyperparam h, double value) {
  const auto as_int = [&] {
    if (!(value == std::floor(value)) || value < std::numeric_limits<int>::min() ||
        value > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("non-integer value for " + std::string(to_string(h)));
    }
    return static_cast<int>(value);
  };
  switch (h) {
    case Hyperparam::NTree: p.ntree = as_int(); break;
    case Hyperparam::Mtry: p.mtry = as_int(); break;
    case Hyperparam::NodeSize: p.nodesize = as_int(); break;
    case Hyperparam::NodeDepth:
      p.nodedepth = std::isinf(value) ? NodeDepth::unlimited() : NodeDepth::limited(as_int());
      break;
    case Hyperparam::SplitRule: p.splitrule = split_rule_from_code(as_int()); break;
    case Hyperparam::NSplit: p.nsplit = as_int(); break;
  }
  return p;
}

std::string value_label(const HyperParams& p, Hyperparam h) {
  switch (h) {
    case Hyperparam::NodeDepth: return p.nodedepth.to_string();
    case Hyperparam::SplitRule: return std::string(to_string(p.splitrule));
    default: return std::to_string(static_cast<long long>(ordinal(p, h)));
  }
}

double ordinal_distance(Hyperparam h, double a, double b) {
  if (a == b) return 0.0;
  if (h == Hyperparam::SplitRule) return 1.0;
  return std::fabs(a - b);
}

}  // namespace rsftune
