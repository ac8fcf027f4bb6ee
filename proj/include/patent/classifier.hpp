#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patent/features.hpp"
#include "patent/forest.hpp"
#include "patent/models.hpp"

namespace patent::models {

/// Current model file format version.
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// A trained estimator together with the featurizer it was fitted with, so
/// raw paragraph text can be classified directly.
struct TextClassifier {
  ModelKind kind = ModelKind::svm;
  features::Featurizer featurizer;
  std::variant<LinearModel, ForestModel> estimator;
  TrainConfig config;

  Prediction predict(std::string_view text) const;
  Prediction predict(const SparseVector& features) const;
  std::size_t n_classes() const;
  const LinearModel* linear() const { return std::get_if<LinearModel>(&estimator); }
  const ForestModel* forest() const { return std::get_if<ForestModel>(&estimator); }
};

struct ClassifierConfig {
  text::NgramConfig ngram;
  text::Stoplist stoplist = text::Stoplist::english();
  TrainConfig train;
  int n_classes = 3;
};

/// Feature representation each kind consumes: NBSVM uses indicators scaled
/// by log-count ratios, every other kind uses tf-idf.
features::FeatureMode feature_mode_for(ModelKind kind);

/// Fits the vocabulary on `texts` only, then trains.
TextClassifier train_classifier(ModelKind kind, std::span<const std::string> texts, std::span<const int> labels,
                                const ClassifierConfig& config);

/// Trains on top of an already fitted featurizer (shared-vocabulary mode).
TextClassifier train_classifier(ModelKind kind, const features::Featurizer& fitted,
                                std::span<const std::string> texts, std::span<const int> labels,
                                const ClassifierConfig& config);

/// Same, for already vectorized rows produced by `fitted`.
TextClassifier train_classifier(ModelKind kind, const features::Featurizer& fitted, const DocTermMatrix& x,
                                std::span<const int> labels, const ClassifierConfig& config);

/// File layout: the 4 bytes "PHLT", a little-endian uint32 version, then a
/// CBOR document (see docs/model_format.md).
std::string serialize_model(const TextClassifier& model);
TextClassifier deserialize_model(std::string_view bytes);
void save_model(const TextClassifier& model, const std::filesystem::path& path);
TextClassifier load_model(const std::filesystem::path& path);

}  // namespace patent::models
