#include "patent/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "patent/error.hpp"

namespace patent::text {

namespace detail {
extern const std::string_view kEnglishStopwords;
}

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Length of a markup tag starting at text[pos] == '<', or 0 if it is not one.
std::size_t markup_tag_length(std::string_view text, std::size_t pos) {
  if (pos + 1 >= text.size()) return 0;
  const auto next = static_cast<unsigned char>(text[pos + 1]);
  if (!is_ascii_alpha(next) && next != '/' && next != '!' && next != '?') return 0;
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    if (text[i] == '>') return i - pos + 1;
    if (text[i] == '<') return 0;
  }
  return 0;
}

// Length of an entity reference starting at text[pos] == '&', or 0.
std::size_t entity_length(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  if (i < text.size() && text[i] == '#') {
    ++i;
    const bool hex = i < text.size() && (text[i] == 'x' || text[i] == 'X');
    if (hex) ++i;
    const std::size_t start = i;
    while (i < text.size() && (is_ascii_digit(static_cast<unsigned char>(text[i])) ||
                               (hex && std::isxdigit(static_cast<unsigned char>(text[i]))))) {
      ++i;
    }
    if (i == start) return 0;
  } else {
    const std::size_t start = i;
    while (i < text.size() && (is_ascii_alpha(static_cast<unsigned char>(text[i])) ||
                               is_ascii_digit(static_cast<unsigned char>(text[i])))) {
      ++i;
    }
    if (i == start) return 0;
  }
  if (i < text.size() && text[i] == ';') return i - pos + 1;
  return 0;
}

// Multi-byte UTF-8 sequences treated as punctuation: no-break space and the
// General Punctuation block (U+2000..U+206F: dashes, curly quotes, ellipsis).
std::size_t unicode_punct_length(std::string_view text, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 == 0xC2 && pos + 1 < text.size() && static_cast<unsigned char>(text[pos + 1]) == 0xA0) {
    return 2;
  }
  if (b0 == 0xE2 && pos + 2 < text.size()) {
    const auto b1 = static_cast<unsigned char>(text[pos + 1]);
    if (b1 == 0x80 || b1 == 0x81) return 3;
  }
  return 0;
}

bool all_digits(std::string_view token) {
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return is_ascii_digit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string normalize(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t skip = 0;
    if (c == '<') {
      skip = markup_tag_length(text, i);
    } else if (c == '&') {
      skip = entity_length(text, i);
    } else if (c >= 0x80) {
      skip = unicode_punct_length(text, i);
    }
    if (skip > 0) {
      cleaned.push_back(' ');
      i += skip;
      continue;
    }
    if (is_ascii_alpha(c)) {
      cleaned.push_back(static_cast<char>(c | 0x20));
    } else if (is_ascii_digit(c) || c >= 0x80) {
      cleaned.push_back(static_cast<char>(c));
    } else {
      cleaned.push_back(' ');
    }
    ++i;
  }

  std::string out;
  out.reserve(cleaned.size());
  for (const auto& token : tokenize(cleaned)) {
    if (all_digits(token)) continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

Stoplist Stoplist::english() { return parse(detail::kEnglishStopwords); }

Stoplist Stoplist::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open stopword file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

Stoplist Stoplist::parse(std::string_view content) {
  std::unordered_set<std::string> terms;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    for (auto& token : tokenize(normalize(line))) terms.insert(std::move(token));
  }
  return Stoplist(std::move(terms));
}

std::vector<std::string> Stoplist::sorted_terms() const {
  std::vector<std::string> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Tokens remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist) {
  Tokens kept;
  kept.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!stoplist.contains(token)) kept.push_back(token);
  }
  return kept;
}

void NgramConfig::validate() const {
  if (min_n < 1 || min_n > max_n || max_n > 3) {
    throw Error(Errc::BadArgument, "n-gram range must satisfy 1 <= min_n <= max_n <= 3");
  }
  if (min_df < 1) throw Error(Errc::BadArgument, "min_df must be >= 1");
}

Tokens ngrams(std::span<const std::string> tokens, const NgramConfig& config) {
  config.validate();
  Tokens out;
  for (int n = config.min_n; n <= config.max_n; ++n) {
    const auto width = static_cast<std::size_t>(n);
    if (tokens.size() < width) continue;
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t j = 1; j < width; ++j) {
        gram.push_back(' ');
        gram += tokens[i + j];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

Tokens analyze(std::string_view raw, const Stoplist& stoplist, const NgramConfig& config) {
  const auto tokens = remove_stopwords(tokenize(normalize(raw)), stoplist);
  return ngrams(tokens, config);
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::int64_t> doc_frequency,
                       std::int64_t n_docs)
    : terms_(std::move(terms)), doc_frequency_(std::move(doc_frequency)), n_docs_(n_docs) {
  if (terms_.size() != doc_frequency_.size()) {
    throw Error(Errc::BadArgument, "vocabulary terms and document frequencies differ in length");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(Errc::BadArgument, "vocabulary terms must be strictly increasing");
    }
    if (doc_frequency_[i] < 1 || doc_frequency_[i] > n_docs_) {
      throw Error(Errc::BadArgument, "document frequency out of range for term '" + terms_[i] + "'");
    }
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const Tokens> documents, const NgramConfig& config) {
  config.validate();
  if (documents.empty()) throw Error(Errc::EmptyCorpus, "cannot build a vocabulary from zero documents");

  std::unordered_map<std::string, std::int64_t> df;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : documents) {
    seen.clear();
    for (const auto& term : doc) {
      if (seen.insert(term).second) ++df[term];
    }
  }

  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(df.size());
  for (auto& [term, count] : df) {
    if (count >= config.min_df) kept.emplace_back(term, count);
  }
  if (config.max_vocab && kept.size() > *config.max_vocab) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    kept.resize(*config.max_vocab);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> terms;
  std::vector<std::int64_t> freqs;
  terms.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freqs), static_cast<std::int64_t>(documents.size()));
}

}  // namespace patent::text
