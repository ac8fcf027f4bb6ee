#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace patent::eval {

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// |test| = round(n * test_fraction). Stratified mode needs `labels` and
/// allocates the test quota per class by largest remainder, so every class
/// is within one sample of its exact proportion. Both index lists are sorted.
Split train_test_split(std::size_t n, const SplitSpec& spec, std::span<const int> labels = {});

/// Seeded partition of 0..n-1 into k folds whose sizes differ by at most one.
/// Each fold is sorted.
std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  /// confusion[gold][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<double> fold_accuracy;
  std::vector<double> fold_macro_f1;
};

/// Classes with zero support get P = R = F1 = 0 and are left out of the
/// macro averages; an undefined ratio counts as 0.
EvalReport evaluate(std::span<const int> gold, std::span<const int> predicted, int n_classes = 3);

using Predictor = std::function<int(const std::string&)>;
using Trainer = std::function<Predictor(std::span<const std::string> texts, std::span<const int> labels)>;

/// For each fold the trainer sees only the other k-1 folds, so any
/// vocabulary or idf it fits never includes held-out text. The report
/// averages per-class and macro metrics over folds (unweighted), sums the
/// confusion matrices and keeps per-fold accuracy and macro-F1.
EvalReport cross_validate(const Trainer& trainer, std::span<const std::string> texts, std::span<const int> labels,
                          std::size_t k, std::uint64_t seed, int n_classes = 3);

nlohmann::json to_json(const EvalReport& report);
/// Per-class rows plus macro averages, laid out as a fixed-width table.
std::string render_table(const EvalReport& report);

}  // namespace patent::eval
