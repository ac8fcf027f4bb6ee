#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patent/models.hpp"

namespace patent::models {

struct TreeNode {
  /// -1 marks a leaf.
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  /// Class probabilities of the bootstrap samples reaching this node.
  std::vector<double> distribution;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Samples go left when x[feature] <= threshold. Node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  int depth() const;
  std::span<const double> leaf_distribution(const SparseVector& x) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_trees = 200;
  int max_depth = 3;
  std::uint64_t seed = 0;
  std::size_t dimension = 0;
  std::vector<int> classes;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Bootstrap-bagged Gini trees; each node considers ceil(sqrt(dimension))
/// features drawn without replacement. Tree i uses the generator stream
/// derived from (seed, i).
ForestModel train_random_forest(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                                const TrainConfig& config);

/// Scores are the leaf distributions averaged over trees.
Prediction predict(const ForestModel& model, const SparseVector& x);

}  // namespace patent::models
