#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace rsftune {

enum class SplitRule { LogRank, LogRankScore, BsGradient };

/// "logrank", "logrankscore", "bs.gradient".
std::string_view to_string(SplitRule rule);
SplitRule parse_split_rule(std::string_view s);

/// Heatmap coding used in range-map exports: 1 bs.gradient, 2 logrank,
/// 3 logrankscore.
int split_rule_code(SplitRule rule);
SplitRule split_rule_from_code(int code);

/// Maximum tree depth, or the Unlimited sentinel. Depth counts edges from the
/// root, so a limit of 1 allows a single split.
class NodeDepth {
 public:
  constexpr NodeDepth() = default;

  static constexpr NodeDepth unlimited() { return NodeDepth(); }
  static NodeDepth limited(int depth);
  /// Accepts a positive integer or "none".
  static NodeDepth parse(std::string_view s);

  constexpr bool is_unlimited() const { return limit_ == 0; }
  int value() const;
  /// True when a node at `depth` may still be split.
  constexpr bool allows_split_at(int depth) const { return limit_ == 0 || depth < limit_; }

  /// "none" for the sentinel, otherwise the decimal limit.
  std::string to_string() const;

  friend constexpr bool operator==(NodeDepth, NodeDepth) = default;

 private:
  int limit_ = 0;
};

/// One forest configuration.
struct HyperParams {
  int ntree = 500;
  int mtry = 1;
  int nodesize = 15;
  NodeDepth nodedepth;
  SplitRule splitrule = SplitRule::LogRank;
  int nsplit = 10;

  /// Throws std::invalid_argument when any field is out of range.
  void validate() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// floor(sqrt(p)), at least 1.
int default_mtry(std::size_t feature_dim);

/// Reference configuration: ntree 500, nodesize 15, logrank, nsplit 10, with
/// mtry = floor(sqrt(p)) and unlimited depth for the unspecified entries.
HyperParams default_params(std::size_t feature_dim);

std::string describe(const HyperParams& params);

enum class Hyperparam { NTree, Mtry, NodeSize, NodeDepth, SplitRule, NSplit };

inline constexpr std::array<Hyperparam, 6> kAllHyperparams = {
    Hyperparam::NTree,     Hyperparam::Mtry,      Hyperparam::NodeSize,
    Hyperparam::NodeDepth, Hyperparam::SplitRule, Hyperparam::NSplit};

std::string_view to_string(Hyperparam h);
Hyperparam parse_hyperparam(std::string_view s);

// Hyperparameter values are compared and sorted through a numeric ordinal:
// the integer value for counts, +inf for unlimited depth, and the heatmap code
// for split rules.
double ordinal(const HyperParams& params, Hyperparam h);
HyperParams with_ordinal(HyperParams params, Hyperparam h, double value);
std::string value_label(const HyperParams& params, Hyperparam h);

/// Distance used to break argmin ties toward the reference value. Split rules
/// are categorical: distance 0 when equal, 1 otherwise.
double ordinal_distance(Hyperparam h, double a, double b);

}  // namespace rsftune
