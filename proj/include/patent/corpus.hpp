#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "patent/ingest.hpp"
#include "patent/text.hpp"

namespace patent::corpus {

inline constexpr int kNumLabels = 3;
using ClassCounts = std::array<std::size_t, kNumLabels>;

struct CorpusConfig {
  std::size_t min_word_count = 10;
  /// Indexed by TagClass: AEI, TP, SP.
  std::array<int, 3> label_map = {1, 2, 0};
  bool balance = true;
  std::uint64_t seed = 42;

  int label_for(ingest::TagClass tag) const { return label_map[static_cast<std::size_t>(tag)]; }
  /// Inverse of label_map.
  ingest::TagClass tag_for(int label) const;
  /// label_map must be a bijection onto {0, 1, 2}.
  void validate() const;
};

struct Sample {
  std::string doc_number;
  std::string title;
  std::string text;
  int label = 0;
  std::size_t paragraph_count = 0;
  int year = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Corpus {
  std::vector<Sample> samples;
  ClassCounts per_class_counts{};

  static Corpus from_samples(std::vector<Sample> samples);
};

struct DocMeta {
  std::string doc_number;
  std::string title;
  int year = 0;
};

/// One sample per segment with at least one paragraph; paragraphs joined by
/// a single space. Segments whose document is missing from `docs` keep an
/// empty title and year 0.
std::vector<Sample> build_samples(std::span<const ingest::TaggedSegment> segments, std::span<const DocMeta> docs,
                                  const CorpusConfig& config);

struct FilterResult {
  std::vector<Sample> samples;
  ClassCounts removed_empty{};
  ClassCounts removed_short{};
};

/// Drops empty texts and texts with fewer than min_word_count tokens after
/// normalization (stopwords still counted).
FilterResult filter_samples(std::span<const Sample> samples, const CorpusConfig& config);

struct DedupResult {
  std::vector<Sample> samples;
  ClassCounts duplicates{};
};

/// Keeps the first sample for each distinct normalized text.
DedupResult deduplicate(std::span<const Sample> samples);

/// Seeded downsampling of every class to the smallest class size; retained
/// samples keep their input order. Identity when balance is off. Throws
/// EmptyClass when a class has no samples.
Corpus balance(const Corpus& corpus, const CorpusConfig& config);

/// Header `doc_num,title,text,label`, RFC 4180 quoting, CRLF-free output
/// (records end with '\n'; quoted fields may contain newlines).
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string write_corpus_string(const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& path);
Corpus read_corpus_string(const std::string& content);

struct LengthSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single sample.
  double std = 0.0;
  double max = 0.0;
};

/// Linear-interpolation quantiles over the token counts.
LengthSummary summarize_lengths(std::vector<double> lengths);

struct CorpusStats {
  std::array<LengthSummary, kNumLabels> lengths;
  std::array<std::map<std::size_t, std::size_t>, kNumLabels> paragraph_histogram;
  std::array<std::vector<std::pair<std::string, std::size_t>>, kNumLabels> top_trigrams;
  std::map<int, ClassCounts> per_year;
};

/// Token lengths and tri-grams are taken after normalization and stopword
/// removal. Tri-grams are ranked by occurrence count, ties lexicographic.
CorpusStats compute_stats(const Corpus& corpus, const text::Stoplist& stoplist, std::size_t top_k = 10);

nlohmann::json to_json(const CorpusStats& stats);
std::string render_table(const CorpusStats& stats);

}  // namespace patent::corpus
