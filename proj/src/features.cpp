#include "patent/features.hpp"

#include <algorithm>
#include <cmath>

#include "patent/error.hpp"

namespace patent::features {

SparseVector::SparseVector(std::size_t dimension, std::vector<Entry> entries) : dimension_(dimension) {
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.index >= dimension) {
      throw Error(Errc::DimensionMismatch, "sparse index " + std::to_string(e.index) +
                                               " outside dimension " + std::to_string(dimension));
    }
    if (!entries_.empty() && entries_.back().index >= e.index) {
      throw Error(Errc::BadArgument, "sparse indices must be strictly increasing");
    }
    if (e.value != 0.0) entries_.push_back(e);
  }
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * dense[e.index];
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * e.value;
  return sum;
}

double SparseVector::value_at(std::uint32_t index) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, std::uint32_t i) { return e.index < i; });
  return it != entries_.end() && it->index == index ? it->value : 0.0;
}

SparseVector SparseVector::with_values(std::span<const double> values) const {
  SparseVector out(dimension_);
  out.entries_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (values[i] != 0.0) out.entries_.push_back({entries_[i].index, values[i]});
  }
  return out;
}

SparseVector SparseVector::widened(std::size_t dimension) const {
  if (dimension < dimension_) throw Error(Errc::DimensionMismatch, "cannot narrow a sparse vector");
  SparseVector out = *this;
  out.dimension_ = dimension;
  return out;
}

SparseVector count_vector(std::span<const std::string> ngrams, const text::Vocabulary& vocab) {
  std::vector<std::uint32_t> hits;
  hits.reserve(ngrams.size());
  for (const auto& gram : ngrams) {
    if (const auto index = vocab.index_of(gram)) hits.push_back(*index);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    entries.push_back({hits[i], static_cast<double>(j - i)});
    i = j;
  }
  return SparseVector(vocab.size(), std::move(entries));
}

DocTermMatrix count_matrix(std::span<const text::Tokens> documents, const text::Vocabulary& vocab) {
  DocTermMatrix m{vocab.size(), {}};
  m.rows.reserve(documents.size());
  for (const auto& doc : documents) m.rows.push_back(count_vector(doc, vocab));
  return m;
}

std::vector<double> idf_table(const text::Vocabulary& vocab) {
  std::vector<double> idf(vocab.size());
  const double n = static_cast<double>(vocab.n_docs());
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(vocab.doc_frequency(i)))) + 1.0;
  }
  return idf;
}

SparseVector tfidf(const SparseVector& counts, std::span<const double> idf) {
  if (counts.dimension() != idf.size()) {
    throw Error(Errc::DimensionMismatch, "idf table does not match vector dimension");
  }
  std::vector<double> values;
  values.reserve(counts.nnz());
  double norm2 = 0.0;
  for (const auto& e : counts.entries()) {
    values.push_back(e.value * idf[e.index]);
    norm2 += values.back() * values.back();
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (auto& v : values) v /= norm;
  }
  return counts.with_values(values);
}

DocTermMatrix tfidf_transform(const DocTermMatrix& counts, const text::Vocabulary& vocab) {
  if (counts.dimension != vocab.size()) {
    throw Error(Errc::DimensionMismatch, "count matrix does not match vocabulary");
  }
  const auto idf = idf_table(vocab);
  DocTermMatrix out{counts.dimension, {}};
  out.rows.reserve(counts.rows.size());
  for (const auto& row : counts.rows) out.rows.push_back(tfidf(row, idf));
  return out;
}

SparseVector binarize(const SparseVector& vector) {
  std::vector<double> ones(vector.nnz(), 1.0);
  return vector.with_values(ones);
}

DocTermMatrix binarize(const DocTermMatrix& matrix) {
  DocTermMatrix out{matrix.dimension, {}};
  out.rows.reserve(matrix.rows.size());
  for (const auto& row : matrix.rows) out.rows.push_back(binarize(row));
  return out;
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::tfidf: return "tfidf";
    case FeatureMode::binary: return "binary";
    case FeatureMode::nb_scaled: return "nb_scaled";
  }
  return "tfidf";
}

FeatureMode feature_mode_from_string(std::string_view name) {
  if (name == "tfidf") return FeatureMode::tfidf;
  if (name == "binary") return FeatureMode::binary;
  if (name == "nb_scaled") return FeatureMode::nb_scaled;
  throw Error(Errc::BadArgument, "unknown feature mode '" + std::string(name) + "'");
}

DocTermMatrix Featurizer::fit_transform(std::span<const std::string> texts) {
  std::vector<text::Tokens> docs;
  docs.reserve(texts.size());
  for (const auto& t : texts) docs.push_back(analyze(t));
  vocab_ = text::build_vocabulary(docs, ngram_);
  idf_ = idf_table(vocab_);
  DocTermMatrix out{vocab_.size(), {}};
  out.rows.reserve(docs.size());
  for (const auto& doc : docs) out.rows.push_back(from_counts(count_vector(doc, vocab_)));
  return out;
}

SparseVector Featurizer::transform(std::string_view text) const {
  return from_counts(count_vector(analyze(text), vocab_));
}

DocTermMatrix Featurizer::transform(std::span<const std::string> texts) const {
  DocTermMatrix out{vocab_.size(), {}};
  out.rows.reserve(texts.size());
  for (const auto& t : texts) out.rows.push_back(transform(t));
  return out;
}

void Featurizer::restore(text::Vocabulary vocab, std::vector<double> idf) {
  if (idf.size() != vocab.size()) throw Error(Errc::CorruptFile, "idf table does not match vocabulary");
  vocab_ = std::move(vocab);
  idf_ = std::move(idf);
}

SparseVector Featurizer::from_counts(SparseVector counts) const {
  switch (mode_) {
    case FeatureMode::tfidf: return tfidf(counts, idf_);
    case FeatureMode::binary:
    case FeatureMode::nb_scaled: return binarize(counts);
  }
  return counts;
}

}  // namespace patent::features
