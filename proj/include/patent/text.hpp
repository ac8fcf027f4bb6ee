#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace patent::text {

using Tokens = std::vector<std::string>;

/// Lowercases, drops markup remnants (`<tag ...>`, `&entity;`), replaces
/// punctuation with spaces, removes purely numeric tokens and collapses
/// whitespace. Bytes >= 0x80 are kept as word characters. Idempotent.
std::string normalize(std::string_view text);

/// Splits on ASCII whitespace; never yields empty tokens.
Tokens tokenize(std::string_view text);

class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::unordered_set<std::string> terms) : terms_(std::move(terms)) {}

  /// The bundled English list (data/stopwords_en.txt).
  static Stoplist english();
  /// One term per line, UTF-8; blank lines and `#` comments ignored.
  static Stoplist load(const std::string& path);
  static Stoplist parse(std::string_view content);

  bool contains(std::string_view term) const { return terms_.contains(std::string(term)); }
  std::size_t size() const { return terms_.size(); }
  /// Sorted member list, used when the stoplist is embedded in a model file.
  std::vector<std::string> sorted_terms() const;

 private:
  std::unordered_set<std::string> terms_;
};

Tokens remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist);

struct NgramConfig {
  int min_n = 1;
  int max_n = 2;
  std::int64_t min_df = 1;
  std::optional<std::size_t> max_vocab;

  void validate() const;
};

/// Contiguous n-grams for n in [min_n, max_n], joined by one space; grouped
/// by n ascending, positional order within each n.
Tokens ngrams(std::span<const std::string> tokens, const NgramConfig& config);

/// normalize -> tokenize -> remove_stopwords -> ngrams.
Tokens analyze(std::string_view raw, const Stoplist& stoplist, const NgramConfig& config);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// `terms` must be strictly increasing; `doc_frequency` parallel to it.
  Vocabulary(std::vector<std::string> terms, std::vector<std::int64_t> doc_frequency,
             std::int64_t n_docs);

  std::size_t size() const { return terms_.size(); }
  std::int64_t n_docs() const { return n_docs_; }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_[index]; }
  std::int64_t doc_frequency(std::uint32_t index) const { return doc_frequency_[index]; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::int64_t>& doc_frequencies() const { return doc_frequency_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.doc_frequency_ == b.doc_frequency_ && a.n_docs_ == b.n_docs_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::int64_t> doc_frequency_;
  std::int64_t n_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Keeps every term with df >= min_df, truncates to max_vocab by df
/// descending (ties lexicographic), then indexes the survivors in sorted
/// term order. Throws EmptyCorpus when `documents` is empty.
Vocabulary build_vocabulary(std::span<const Tokens> documents, const NgramConfig& config);

}  // namespace patent::text
