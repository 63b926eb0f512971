#include "rsftune/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "parallel.hpp"
#include "rsftune/random.hpp"
#include "rsftune/split_rules.hpp"

namespace rsftune {

namespace {

// Training records reordered by ascending time, stored column-major. Index
// order equals time order, so sorting sample indices also sorts them by time.
struct TrainingView {
  std::vector<std::vector<double>> columns;
  std::vector<double> times;
  std::vector<int> events;

  explicit TrainingView(const SurvivalDataset& ds) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ds.records[a].time < ds.records[b].time; });
    const std::size_t p = ds.feature_dim();
    columns.assign(p, std::vector<double>(ds.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& r = ds.records[order[i]];
      times.push_back(r.time);
      events.push_back(r.event);
      for (std::size_t f = 0; f < p; ++f) columns[f][i] = r.features[f];
    }
  }

  std::size_t size() const { return times.size(); }
  std::size_t feature_dim() const { return columns.size(); }
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double statistic = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingView& data, const HyperParams& params, int mtry, std::span<const double> grid,
              std::uint64_t key)
      : data_(data),
        params_(params),
        mtry_(static_cast<std::size_t>(mtry)),
        min_child_(static_cast<std::size_t>(std::max(1, params.nodesize / 2))),
        grid_(grid),
        rng_(key),
        features_(data.feature_dim()) {}

  SurvivalTree build() {
    const std::size_t n = data_.size();
    std::vector<std::uint32_t> samples(n);
    for (auto& s : samples) s = static_cast<std::uint32_t>(rng_.below(n));
    std::sort(samples.begin(), samples.end());
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<std::uint32_t> samples, int depth) {
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[index].n_samples = static_cast<std::int32_t>(samples.size());

    times_.clear();
    events_.clear();
    for (auto s : samples) {
      times_.push_back(data_.times[s]);
      events_.push_back(data_.events[s]);
    }

    std::optional<Split> split;
    if (splittable(depth)) split = find_split(samples);
    if (!split) {
      tree_.nodes[index].leaf = static_cast<std::int32_t>(tree_.leaf_chf.size());
      tree_.leaf_chf.push_back(nelson_aalen(times_, events_, grid_).values);
      return index;
    }

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    const auto& column = data_.columns[static_cast<std::size_t>(split->feature)];
    for (auto s : samples) (column[s] <= split->threshold ? left : right).push_back(s);
    samples = {};

    tree_.nodes[index].feature = split->feature;
    tree_.nodes[index].threshold = split->threshold;
    const std::int32_t l = grow(std::move(left), depth + 1);
    const std::int32_t r = grow(std::move(right), depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

  bool splittable(int depth) const {
    if (!params_.nodedepth.allows_split_at(depth)) return false;
    if (times_.size() <= static_cast<std::size_t>(params_.nodesize)) return false;
    if (times_.front() == times_.back()) return false;  // pure in time
    return std::find(events_.begin(), events_.end(), 1) != events_.end();
  }

  std::optional<Split> find_split(const std::vector<std::uint32_t>& samples) {
    const std::size_t n = samples.size();
    const NodeSplitScorer scorer(params_.splitrule, times_, events_);

    // mtry features without replacement, visited in ascending index order.
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    const std::size_t p = features_.size();
    for (std::size_t i = 0; i < mtry_; ++i) std::swap(features_[i], features_[i + rng_.below(p - i)]);
    std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry_));

    const auto events_total = static_cast<std::size_t>(std::count(events_.begin(), events_.end(), 1));
    std::optional<Split> best;
    values_.resize(n);
    mask_.resize(n);
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t f = features_[k];
      const auto& column = data_.columns[f];
      for (std::size_t i = 0; i < n; ++i) values_[i] = column[samples[i]];
      const auto [lo_it, hi_it] = std::minmax_element(values_.begin(), values_.end());
      const double lo = *lo_it;
      const double hi = *hi_it;
      if (!(lo < hi)) continue;

      for (double threshold : candidate_thresholds(lo, hi)) {
        std::size_t n_left = 0;
        std::size_t events_left = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const bool left = values_[i] <= threshold;
          mask_[i] = left ? 1 : 0;
          n_left += left;
          events_left += left && events_[i] == 1;
        }
        const std::size_t n_right = n - n_left;
        if (n_left < min_child_ || n_right < min_child_) continue;
        // Each child must keep at least one event.
        if (events_left == 0 || events_left == events_total) continue;

        const double stat = scorer.score(mask_);
        if (!std::isfinite(stat)) continue;
        if (!best || stat > best->statistic) best = Split{static_cast<int>(f), threshold, stat};
      }
    }
    return best;
  }

  // Sorted ascending. nsplit = 0: every midpoint between distinct values;
  // otherwise nsplit distinct uniform draws on the open range (lo, hi).
  std::vector<double> candidate_thresholds(double lo, double hi) {
    std::vector<double> out;
    if (params_.nsplit == 0) {
      distinct_ = values_;
      std::sort(distinct_.begin(), distinct_.end());
      distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
      for (std::size_t i = 0; i + 1 < distinct_.size(); ++i) {
        double mid = distinct_[i] + (distinct_[i + 1] - distinct_[i]) / 2.0;
        if (!(mid < distinct_[i + 1])) mid = distinct_[i];
        out.push_back(mid);
      }
      return out;
    }
    const auto wanted = static_cast<std::size_t>(params_.nsplit);
    std::size_t attempts = 0;
    while (out.size() < wanted && attempts < 8 * wanted) {
      ++attempts;
      const double t = lo + rng_.uniform() * (hi - lo);
      if (!(t > lo && t < hi)) continue;
      if (std::find(out.begin(), out.end(), t) != out.end()) continue;
      out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  const TrainingView& data_;
  const HyperParams& params_;
  std::size_t mtry_;
  std::size_t min_child_;
  std::span<const double> grid_;
  Rng rng_;
  SurvivalTree tree_;

  // Scratch buffers reused across nodes.
  std::vector<std::size_t> features_;
  std::vector<double> times_;
  std::vector<int> events_;
  std::vector<double> values_;
  std::vector<double> distinct_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace

const TreeNode& SurvivalTree::route(std::span<const double> x) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_terminal()) {
    const double v = x[static_cast<std::size_t>(node->feature)];
    node = &nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

int SurvivalTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> depth_of(nodes.size(), 0);
  int deepest = 0;
  // Children are always stored after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.is_terminal()) continue;
    for (std::int32_t child : {node.left, node.right}) {
      depth_of[static_cast<std::size_t>(child)] = depth_of[i] + 1;
      deepest = std::max(deepest, depth_of[i] + 1);
    }
  }
  return deepest;
}

ChfCurve SurvivalForest::terminal_curve(std::size_t tree, std::span<const double> x) const {
  const auto& t = trees.at(tree);
  return ChfCurve{time_grid, t.leaf_chf[static_cast<std::size_t>(t.route(x).leaf)]};
}

SurvivalForest fit(const SurvivalDataset& ds, const HyperParams& params, std::uint64_t seed, int workers) {
  params.validate();
  if (ds.size() < 2) throw std::invalid_argument("fit: need at least 2 records");
  ds.validate();
  const std::size_t p = ds.feature_dim();
  const int mtry = std::min<int>(params.mtry, static_cast<int>(p));
  if (mtry < 1) throw std::invalid_argument("fit: mtry must be >= 1 after clamping to the feature count");

  const TrainingView view(ds);
  SurvivalForest forest;
  forest.params = params;
  forest.seed = seed;
  forest.feature_dim = p;
  for (std::size_t i = 0; i < view.size(); ++i) {
    if (view.events[i] == 1 && (forest.time_grid.empty() || view.times[i] > forest.time_grid.back())) {
      forest.time_grid.push_back(view.times[i]);
    }
  }

  forest.trees.resize(static_cast<std::size_t>(params.ntree));
  detail::parallel_for(forest.trees.size(), workers, [&](std::size_t t) {
    TreeBuilder builder(view, params, mtry, forest.time_grid, derive_seed({seed, t}));
    forest.trees[t] = builder.build();
  });
  return forest;
}

namespace {

void check_dim(const SurvivalForest& forest, std::span<const double> x) {
  if (x.size() != forest.feature_dim) {
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                std::to_string(forest.feature_dim));
  }
}

}  // namespace

ChfCurve predict_chf(const SurvivalForest& forest, std::span<const double> x) {
  check_dim(forest, x);
  ChfCurve out;
  out.times = forest.time_grid;
  out.values.assign(forest.time_grid.size(), 0.0);
  for (const auto& tree : forest.trees) {
    const auto& leaf = tree.leaf_chf[static_cast<std::size_t>(tree.route(x).leaf)];
    for (std::size_t g = 0; g < leaf.size(); ++g) out.values[g] += leaf[g];
  }
  const auto count = static_cast<double>(forest.trees.size());
  for (double& v : out.values) v /= count;
  return out;
}

double mortality(const ChfCurve& chf) { return std::accumulate(chf.values.begin(), chf.values.end(), 0.0); }

double predict_risk(const SurvivalForest& forest, std::span<const double> x) {
  return mortality(predict_chf(forest, x));
}

double predict_survival(const SurvivalForest& forest, std::span<const double> x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("predict_survival: t must be positive");
  return std::exp(-predict_chf(forest, x).at(t));
}

}  // namespace rsftune
