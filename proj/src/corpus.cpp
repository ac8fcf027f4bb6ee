#include "patent/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "patent/error.hpp"
#include "patent/random.hpp"

namespace patent::corpus {

namespace {

std::size_t label_slot(int label) {
  if (label < 0 || label >= kNumLabels) throw Error(Errc::BadLabel, "label " + std::to_string(label) + " not in {0,1,2}");
  return static_cast<std::size_t>(label);
}

}  // namespace

ingest::TagClass CorpusConfig::tag_for(int label) const {
  for (std::size_t t = 0; t < label_map.size(); ++t) {
    if (label_map[t] == label) return static_cast<ingest::TagClass>(t);
  }
  throw Error(Errc::BadLabel, "no tag maps to label " + std::to_string(label));
}

void CorpusConfig::validate() const {
  std::array<bool, 3> seen{};
  for (const int label : label_map) {
    if (label < 0 || label > 2 || seen[static_cast<std::size_t>(label)]) {
      throw Error(Errc::BadArgument, "label_map must be a bijection onto {0,1,2}");
    }
    seen[static_cast<std::size_t>(label)] = true;
  }
}

Corpus Corpus::from_samples(std::vector<Sample> samples) {
  Corpus c;
  for (const auto& s : samples) ++c.per_class_counts[label_slot(s.label)];
  c.samples = std::move(samples);
  return c;
}

std::vector<Sample> build_samples(std::span<const ingest::TaggedSegment> segments, std::span<const DocMeta> docs,
                                  const CorpusConfig& config) {
  config.validate();
  std::unordered_map<std::string, const DocMeta*> by_number;
  for (const auto& d : docs) by_number.emplace(d.doc_number, &d);

  std::vector<Sample> samples;
  for (const auto& seg : segments) {
    if (seg.paragraphs.empty()) continue;
    Sample s;
    s.doc_number = seg.source_doc;
    if (const auto it = by_number.find(seg.source_doc); it != by_number.end()) {
      s.title = it->second->title;
      s.year = it->second->year;
    }
    for (const auto& p : seg.paragraphs) {
      if (!s.text.empty()) s.text.push_back(' ');
      s.text += p;
    }
    s.label = config.label_for(seg.tag);
    s.paragraph_count = seg.paragraphs.size();
    samples.push_back(std::move(s));
  }
  return samples;
}

FilterResult filter_samples(std::span<const Sample> samples, const CorpusConfig& config) {
  FilterResult out;
  for (const auto& s : samples) {
    const auto slot = label_slot(s.label);
    const auto n_tokens = text::tokenize(text::normalize(s.text)).size();
    if (n_tokens == 0) {
      ++out.removed_empty[slot];
    } else if (n_tokens < config.min_word_count) {
      ++out.removed_short[slot];
    } else {
      out.samples.push_back(s);
    }
  }
  return out;
}

DedupResult deduplicate(std::span<const Sample> samples) {
  DedupResult out;
  std::unordered_set<std::string> seen;
  for (const auto& s : samples) {
    if (seen.insert(text::normalize(s.text)).second) {
      out.samples.push_back(s);
    } else {
      ++out.duplicates[label_slot(s.label)];
    }
  }
  return out;
}

Corpus balance(const Corpus& corpus, const CorpusConfig& config) {
  std::array<std::vector<std::size_t>, kNumLabels> members;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    members[label_slot(corpus.samples[i].label)].push_back(i);
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) throw Error(Errc::EmptyClass, "class " + std::to_string(c) + " has no samples");
  }
  if (!config.balance) return Corpus::from_samples(corpus.samples);

  std::size_t target = members[0].size();
  for (const auto& m : members) target = std::min(target, m.size());
  std::vector<bool> keep(corpus.samples.size(), false);
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto pool = members[c];
    Rng rng = Rng::derive(config.seed, c);
    rng.shuffle(std::span<std::size_t>(pool));
    for (std::size_t k = 0; k < target; ++k) keep[pool[k]] = true;
  }
  std::vector<Sample> kept;
  kept.reserve(target * members.size());
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    if (keep[i]) kept.push_back(corpus.samples[i]);
  }
  return Corpus::from_samples(std::move(kept));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kHeader = "doc_num,title,text,label";

void write_field(std::string& out, std::string_view field) {
  const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) {
    out += field;
    return;
  }
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

// RFC 4180 records; a record ends at an unquoted '\n' (a preceding '\r' is dropped).
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (content.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
      row.clear();
      field.clear();
      field_started = false;
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      continue;
    } else {
      if (field_started) throw Error(Errc::SchemaMismatch, "text after closing quote in CSV row " + std::to_string(rows.size() + 1));
      field.push_back(c);
    }
  }
  if (in_quotes) throw Error(Errc::SchemaMismatch, "unterminated quoted field");
  if (!field.empty() || field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string write_corpus_string(const Corpus& corpus) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& s : corpus.samples) {
    write_field(out, s.doc_number);
    out.push_back(',');
    write_field(out, s.title);
    out.push_back(',');
    write_field(out, s.text);
    out.push_back(',');
    out += std::to_string(s.label);
    out.push_back('\n');
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write corpus file " + path.string());
  const auto content = write_corpus_string(corpus);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::IoFailure, "failed writing corpus file " + path.string());
}

Corpus read_corpus_string(const std::string& content) {
  const auto rows = parse_csv(content);
  if (rows.empty() || rows.front() != std::vector<std::string>{"doc_num", "title", "text", "label"}) {
    throw Error(Errc::SchemaMismatch, "expected header '" + std::string(kHeader) + "'");
  }
  std::vector<Sample> samples;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 4) {
      throw Error(Errc::SchemaMismatch, "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) + " fields");
    }
    Sample s;
    s.doc_number = row[0];
    s.title = row[1];
    s.text = row[2];
    if (row[3].size() != 1 || row[3][0] < '0' || row[3][0] > '2') {
      throw Error(Errc::BadLabel, "row " + std::to_string(r + 1) + " has label '" + row[3] + "'");
    }
    s.label = row[3][0] - '0';
    samples.push_back(std::move(s));
  }
  return Corpus::from_samples(std::move(samples));
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open corpus file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return read_corpus_string(buffer.str());
}

// ---------------------------------------------------------------------------
// statistics

LengthSummary summarize_lengths(std::vector<double> lengths) {
  LengthSummary s;
  s.count = lengths.size();
  if (lengths.empty()) return s;
  std::sort(lengths.begin(), lengths.end());
  const double n = static_cast<double>(lengths.size());
  s.mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
  s.min = lengths.front();
  s.max = lengths.back();
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, lengths.size() - 1);
    return lengths[lo] + (pos - static_cast<double>(lo)) * (lengths[hi] - lengths[lo]);
  };
  s.q25 = quantile(0.25);
  s.q50 = quantile(0.50);
  s.q75 = quantile(0.75);
  if (lengths.size() > 1) {
    double ss = 0.0;
    for (const double v : lengths) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

CorpusStats compute_stats(const Corpus& corpus, const text::Stoplist& stoplist, std::size_t top_k) {
  CorpusStats stats;
  std::array<std::vector<double>, kNumLabels> lengths;
  std::array<std::unordered_map<std::string, std::size_t>, kNumLabels> trigram_counts;
  const text::NgramConfig trigrams{3, 3, 1, std::nullopt};
  for (const auto& s : corpus.samples) {
    const auto slot = label_slot(s.label);
    const auto tokens = text::remove_stopwords(text::tokenize(text::normalize(s.text)), stoplist);
    lengths[slot].push_back(static_cast<double>(tokens.size()));
    ++stats.paragraph_histogram[slot][s.paragraph_count];
    for (auto& gram : text::ngrams(tokens, trigrams)) ++trigram_counts[slot][std::move(gram)];
    if (s.year != 0) ++stats.per_year[s.year][slot];
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    stats.lengths[c] = summarize_lengths(std::move(lengths[c]));
    std::vector<std::pair<std::string, std::size_t>> ranked(trigram_counts[c].begin(), trigram_counts[c].end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    stats.top_trigrams[c] = std::move(ranked);
  }
  return stats;
}

nlohmann::json to_json(const CorpusStats& stats) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const auto& l = stats.lengths[c];
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto& [paragraphs, count] : stats.paragraph_histogram[c]) histogram[std::to_string(paragraphs)] = count;
    nlohmann::json trigrams = nlohmann::json::array();
    for (const auto& [gram, count] : stats.top_trigrams[c]) trigrams.push_back({{"trigram", gram}, {"count", count}});
    classes.push_back({{"label", c},
                       {"tokens", {{"count", l.count}, {"mean", l.mean}, {"min", l.min}, {"25%", l.q25},
                                   {"50%", l.q50}, {"75%", l.q75}, {"std", l.std}, {"max", l.max}}},
                       {"paragraph_histogram", std::move(histogram)},
                       {"top_trigrams", std::move(trigrams)}});
  }
  nlohmann::json years = nlohmann::json::object();
  for (const auto& [year, counts] : stats.per_year) years[std::to_string(year)] = counts;
  return {{"classes", std::move(classes)}, {"per_year", std::move(years)}};
}

std::string render_table(const CorpusStats& stats) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %12s %12s %12s\n", "tokens", "label 0", "label 1", "label 2");
  out << line;
  const std::pair<const char*, double LengthSummary::*> rows[] = {
      {"mean", &LengthSummary::mean}, {"min", &LengthSummary::min}, {"25%", &LengthSummary::q25},
      {"50%", &LengthSummary::q50},   {"75%", &LengthSummary::q75}, {"std", &LengthSummary::std},
      {"max", &LengthSummary::max}};
  for (const auto& [name, field] : rows) {
    std::snprintf(line, sizeof line, "%-6s %12.2f %12.2f %12.2f\n", name, stats.lengths[0].*field,
                  stats.lengths[1].*field, stats.lengths[2].*field);
    out << line;
  }
  out << "\ntop tri-grams\n";
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    for (const auto& [gram, count] : stats.top_trigrams[c]) {
      std::snprintf(line, sizeof line, "%-6zu %-40s %10zu\n", c, gram.c_str(), count);
      out << line;
    }
  }
  if (!stats.per_year.empty()) {
    out << "\nper-year label counts\n";
    std::snprintf(line, sizeof line, "%-6s %10s %10s %10s\n", "year", "label 0", "label 1", "label 2");
    out << line;
    for (auto it = stats.per_year.rbegin(); it != stats.per_year.rend(); ++it) {
      std::snprintf(line, sizeof line, "%-6d %10zu %10zu %10zu\n", it->first, it->second[0], it->second[1],
                    it->second[2]);
      out << line;
    }
  }
  return out.str();
}

}  // namespace patent::corpus
