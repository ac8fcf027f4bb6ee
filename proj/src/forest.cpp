#include "patent/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patent/error.hpp"
#include "patent/random.hpp"

namespace patent::models {

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) {
      deepest = std::max(deepest, d);
    } else {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

std::span<const double> DecisionTree::leaf_distribution(const SparseVector& x) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& node = nodes[id];
    const double value = x.value_at(static_cast<std::uint32_t>(node.feature));
    id = static_cast<std::size_t>(value <= node.threshold ? node.left : node.right);
  }
  return nodes[id].distribution;
}

namespace {

// Column-major copy of the training matrix for per-feature split scans.
struct Columns {
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> row;
  std::vector<double> value;

  explicit Columns(const DocTermMatrix& x) {
    std::vector<std::size_t> count(x.dimension + 1, 0);
    for (const auto& r : x.rows) {
      for (const auto& e : r.entries()) ++count[e.index + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    start = count;
    row.resize(start.back());
    value.resize(start.back());
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      for (const auto& e : x.rows[i].entries()) {
        const std::size_t at = cursor[e.index]++;
        row[at] = static_cast<std::uint32_t>(i);
        value[at] = e.value;
      }
    }
  }
};

double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (const double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DocTermMatrix& x, const Columns& columns, std::span<const int> labels, int n_classes,
              int max_depth, Rng rng)
      : x_(x), columns_(columns), labels_(labels), n_classes_(static_cast<std::size_t>(n_classes)),
        max_depth_(max_depth), rng_(std::move(rng)), node_of_(labels.size(), -1), weight_(labels.size(), 0.0) {
    features_per_node_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.dimension)))));
    features_per_node_ = std::min(features_per_node_, x.dimension);
  }

  DecisionTree build() {
    const std::size_t n = labels_.size();
    for (std::size_t draw = 0; draw < n; ++draw) weight_[rng_.below(n)] += 1.0;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0.0) {
        members.push_back(i);
        node_of_[i] = 0;
      }
    }
    tree_.nodes.emplace_back();
    grow(0, members, 0);
    return std::move(tree_);
  }

 private:
  std::vector<double> class_weights(std::span<const std::size_t> members) const {
    std::vector<double> counts(n_classes_, 0.0);
    for (const std::size_t i : members) counts[static_cast<std::size_t>(labels_[i])] += weight_[i];
    return counts;
  }

  void grow(std::int32_t id, std::vector<std::size_t> members, int depth) {
    const auto counts = class_weights(members);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    {
      auto& node = tree_.nodes[static_cast<std::size_t>(id)];
      node.distribution.resize(n_classes_, 0.0);
      for (std::size_t c = 0; c < n_classes_; ++c) node.distribution[c] = total > 0.0 ? counts[c] / total : 0.0;
    }
    const double impurity = gini(counts, total);
    if (depth >= max_depth_ || impurity <= 0.0 || total < 2.0 || x_.dimension == 0) return;

    const auto split = best_split(id, counts, total, impurity);
    if (split.feature < 0) return;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (const std::size_t i : members) {
      const double v = x_.rows[i].value_at(static_cast<std::uint32_t>(split.feature));
      (v <= split.threshold ? left : right).push_back(i);
    }
    if (left.empty() || right.empty()) return;

    const auto left_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const auto right_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_id;
    node.right = right_id;
    for (const std::size_t i : left) node_of_[i] = left_id;
    for (const std::size_t i : right) node_of_[i] = right_id;
    grow(left_id, std::move(left), depth + 1);
    grow(right_id, std::move(right), depth + 1);
  }

  // Partial Fisher-Yates over the feature indices.
  std::vector<std::uint32_t> sample_features() {
    const std::size_t dim = x_.dimension;
    std::vector<std::uint32_t> chosen;
    chosen.reserve(features_per_node_);
    if (features_per_node_ * 4 >= dim) {
      std::vector<std::uint32_t> all(dim);
      std::iota(all.begin(), all.end(), 0u);
      for (std::size_t k = 0; k < features_per_node_; ++k) {
        std::swap(all[k], all[k + rng_.below(dim - k)]);
        chosen.push_back(all[k]);
      }
      return chosen;
    }
    std::vector<bool> taken(dim, false);
    while (chosen.size() < features_per_node_) {
      const auto f = static_cast<std::uint32_t>(rng_.below(dim));
      if (!taken[f]) {
        taken[f] = true;
        chosen.push_back(f);
      }
    }
    return chosen;
  }

  Split best_split(std::int32_t id, std::span<const double> node_counts, double total, double parent) {
    constexpr std::size_t kZeroBlock = static_cast<std::size_t>(-1);
    Split best;
    best.impurity = parent;
    // (feature value, sample); samples without an entry for the feature sit
    // at value 0 and move together as one block.
    std::vector<std::pair<double, std::size_t>> items;
    std::vector<double> zero_counts(n_classes_);
    std::vector<double> left(n_classes_);
    std::vector<double> right(n_classes_);
    for (const std::uint32_t f : sample_features()) {
      items.clear();
      std::copy(node_counts.begin(), node_counts.end(), zero_counts.begin());
      double zero_total = total;
      for (std::size_t k = columns_.start[f]; k < columns_.start[f + 1]; ++k) {
        const std::size_t i = columns_.row[k];
        if (node_of_[i] != id) continue;
        items.emplace_back(columns_.value[k], i);
        zero_counts[static_cast<std::size_t>(labels_[i])] -= weight_[i];
        zero_total -= weight_[i];
      }
      if (items.empty()) continue;
      if (zero_total > 0.0) items.emplace_back(0.0, kZeroBlock);
      std::sort(items.begin(), items.end());

      std::fill(left.begin(), left.end(), 0.0);
      double left_total = 0.0;
      for (std::size_t k = 0; k + 1 < items.size(); ++k) {
        const auto [value, sample] = items[k];
        if (sample == kZeroBlock) {
          for (std::size_t c = 0; c < n_classes_; ++c) left[c] += zero_counts[c];
          left_total += zero_total;
        } else {
          left[static_cast<std::size_t>(labels_[sample])] += weight_[sample];
          left_total += weight_[sample];
        }
        const double next = items[k + 1].first;
        if (!(next > value)) continue;
        for (std::size_t c = 0; c < n_classes_; ++c) right[c] = node_counts[c] - left[c];
        const double right_total = total - left_total;
        const double weighted = (left_total * gini(left, left_total) + right_total * gini(right, right_total)) / total;
        if (weighted < best.impurity - 1e-12) {
          best.impurity = weighted;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = 0.5 * (value + next);
        }
      }
    }
    return best;
  }

  const DocTermMatrix& x_;
  const Columns& columns_;
  std::span<const int> labels_;
  std::size_t n_classes_;
  int max_depth_;
  Rng rng_;
  std::size_t features_per_node_ = 1;
  std::vector<std::int32_t> node_of_;
  std::vector<double> weight_;
  DecisionTree tree_;
};

}  // namespace

ForestModel train_random_forest(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                                const TrainConfig& config) {
  config.validate();
  if (x.rows.size() != labels.size()) throw Error(Errc::LengthMismatch, "feature rows and labels differ in length");
  class_counts(labels, n_classes);

  ForestModel forest;
  forest.n_trees = config.n_trees;
  forest.max_depth = config.max_depth;
  forest.seed = config.seed;
  forest.dimension = x.dimension;
  forest.classes.resize(static_cast<std::size_t>(n_classes));
  std::iota(forest.classes.begin(), forest.classes.end(), 0);

  const Columns columns(x);
  forest.trees.reserve(static_cast<std::size_t>(config.n_trees));
  for (int t = 0; t < config.n_trees; ++t) {
    TreeBuilder builder(x, columns, labels, n_classes, config.max_depth,
                        Rng::derive(config.seed, static_cast<std::uint64_t>(t)));
    forest.trees.push_back(builder.build());
  }
  return forest;
}

Prediction predict(const ForestModel& model, const SparseVector& x) {
  if (x.dimension() != model.dimension) {
    throw Error(Errc::DimensionMismatch, "input dimension " + std::to_string(x.dimension()) +
                                             " does not match forest dimension " +
                                             std::to_string(model.dimension));
  }
  Prediction p;
  p.scores.assign(model.classes.size(), 0.0);
  for (const auto& tree : model.trees) {
    const auto dist = tree.leaf_distribution(x);
    for (std::size_t c = 0; c < p.scores.size(); ++c) p.scores[c] += dist[c];
  }
  if (!model.trees.empty()) {
    for (auto& s : p.scores) s /= static_cast<double>(model.trees.size());
  }
  p.label = model.classes[argmax(p.scores)];
  return p;
}

}  // namespace patent::models
