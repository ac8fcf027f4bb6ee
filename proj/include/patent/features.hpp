#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patent/text.hpp"

namespace patent::features {

struct Entry {
  std::uint32_t index = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sorted (index, value) pairs; indices strictly increasing and < dimension,
/// values never zero.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}
  /// Validates the invariants; zero values are dropped.
  SparseVector(std::size_t dimension, std::vector<Entry> entries);

  std::size_t dimension() const { return dimension_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double dot(std::span<const double> dense) const;
  double squared_norm() const;
  double value_at(std::uint32_t index) const;

  /// Same support, values replaced.
  SparseVector with_values(std::span<const double> values) const;
  /// Same vector in a larger space; indices are unchanged.
  SparseVector widened(std::size_t dimension) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Entry> entries_;
};

struct DocTermMatrix {
  std::size_t dimension = 0;
  std::vector<SparseVector> rows;

  std::size_t n_rows() const { return rows.size(); }
};

SparseVector count_vector(std::span<const std::string> ngrams, const text::Vocabulary& vocab);

DocTermMatrix count_matrix(std::span<const text::Tokens> documents, const text::Vocabulary& vocab);

/// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
std::vector<double> idf_table(const text::Vocabulary& vocab);

/// count * idf, then L2 row normalization; zero rows stay zero.
SparseVector tfidf(const SparseVector& counts, std::span<const double> idf);
DocTermMatrix tfidf_transform(const DocTermMatrix& counts, const text::Vocabulary& vocab);

SparseVector binarize(const SparseVector& vector);
DocTermMatrix binarize(const DocTermMatrix& matrix);

enum class FeatureMode { tfidf, binary, nb_scaled };

std::string_view to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(std::string_view name);

/// Everything needed to turn raw paragraph text into a model's input
/// vector: stoplist, n-gram settings, the fitted vocabulary and idf table.
/// `nb_scaled` produces binary indicators; the per-class ratio scaling is
/// applied by the model itself.
class Featurizer {
 public:
  Featurizer() = default;
  Featurizer(text::Stoplist stoplist, text::NgramConfig ngram, FeatureMode mode)
      : stoplist_(std::move(stoplist)), ngram_(ngram), mode_(mode) {}

  /// Fits the vocabulary (and idf) on `texts` and returns their vectors.
  DocTermMatrix fit_transform(std::span<const std::string> texts);
  SparseVector transform(std::string_view text) const;
  DocTermMatrix transform(std::span<const std::string> texts) const;

  text::Tokens analyze(std::string_view text) const { return text::analyze(text, stoplist_, ngram_); }

  const text::Stoplist& stoplist() const { return stoplist_; }
  const text::NgramConfig& ngram() const { return ngram_; }
  FeatureMode mode() const { return mode_; }
  const text::Vocabulary& vocabulary() const { return vocab_; }
  std::span<const double> idf() const { return idf_; }
  std::size_t dimension() const { return vocab_.size(); }

  /// Restores a fitted state (used by model loading).
  void restore(text::Vocabulary vocab, std::vector<double> idf);

 private:
  SparseVector from_counts(SparseVector counts) const;

  text::Stoplist stoplist_;
  text::NgramConfig ngram_;
  FeatureMode mode_ = FeatureMode::tfidf;
  text::Vocabulary vocab_;
  std::vector<double> idf_;
};

}  // namespace patent::features
