#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "patent/features.hpp"

namespace patent::models {

using features::DocTermMatrix;
using features::SparseVector;

enum class ModelKind { mnb, logreg, svm, nbsvm, forest };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);
bool is_linear(ModelKind kind);

struct TrainConfig {
  int epochs = 20;
  /// Step size at update t is learning_rate / sqrt(t).
  double learning_rate = 0.5;
  /// L2 strength for logistic regression.
  double l2_lambda = 1e-5;
  /// SVM cost; the per-sample L2 strength is 1 / (svm_c * n).
  double svm_c = 1.0;
  double nbsvm_beta = 0.25;
  double nbsvm_alpha = 1.0;
  double mnb_alpha = 1.0;
  /// Relative change in the epoch objective below which training counts as converged.
  double tolerance = 1e-4;
  int n_trees = 200;
  int max_depth = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-class weight vectors and intercepts. For NBSVM `nb_ratios` holds the
/// per-class log-count ratio r_c and the class score is w_c . (r_c o x) + b_c;
/// for every other kind it is empty and the score is w_c . x + b_c.
struct LinearModel {
  ModelKind kind = ModelKind::svm;
  features::FeatureMode feature_mode = features::FeatureMode::tfidf;
  std::vector<int> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> intercepts;
  std::vector<std::vector<double>> nb_ratios;

  std::size_t dimension() const { return weights.empty() ? 0 : weights.front().size(); }
  std::size_t n_classes() const { return classes.size(); }
  /// Weight applied to a raw feature value: w_c[t], times r_c[t] for NBSVM.
  double effective_weight(std::size_t class_index, std::uint32_t term) const;
  double class_score(std::size_t class_index, const SparseVector& x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainDiagnostics {
  /// Final training objective for each one-vs-rest problem (empty for MNB).
  std::vector<double> final_loss;
  bool converged = true;
};

struct LinearFit {
  LinearModel model;
  TrainDiagnostics diagnostics;
};

struct Prediction {
  int label = 0;
  std::vector<double> scores;
};

/// Label = classes[argmax score]; ties go to the lowest class index.
Prediction predict(const LinearModel& model, const SparseVector& x);
std::size_t argmax(std::span<const double> scores);

/// Counts per class of labels in [0, n_classes); throws EmptyClass when a
/// class has no sample and UnknownLabel for labels outside the range.
std::vector<std::size_t> class_counts(std::span<const int> labels, int n_classes);

LinearFit train_mnb(const DocTermMatrix& counts, std::span<const int> labels, int n_classes, double alpha);
LinearFit train_logreg(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                       const TrainConfig& config);
LinearFit train_linear_svm(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                           const TrainConfig& config);

struct NbRatioComponent {
  std::vector<double> r;
  /// ln(N_c / N_rest)
  double b = 0.0;
};

struct NbRatio {
  std::vector<std::vector<double>> r;
  double alpha = 1.0;
  std::vector<double> b;
};

/// p = alpha + sum of class-c rows, q = alpha + sum of the other rows,
/// r = ln((p / |p|_1) / (q / |q|_1)).
NbRatioComponent log_count_ratio(const DocTermMatrix& x_binary, std::span<const int> labels, int target_class,
                                 double alpha);
NbRatio log_count_ratios(const DocTermMatrix& x_binary, std::span<const int> labels, int n_classes, double alpha);

/// One-vs-rest SVMs on r_c-scaled indicators with weights interpolated
/// toward their mean magnitude: w' = (1 - beta) * mean|w| + beta * w.
LinearFit train_nbsvm(const DocTermMatrix& x_binary, std::span<const int> labels, int n_classes,
                      const TrainConfig& config);

/// Elementwise r o x.
SparseVector scale_features(const SparseVector& x, std::span<const double> r);

}  // namespace patent::models
