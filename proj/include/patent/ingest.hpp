#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace patent::ingest {

/// One USPTO weekly full-text file, plain XML or a zip holding one XML.
struct RawBulkFile {
  std::string source_name;
  std::string content;
};

struct Heading {
  std::string text;
  friend bool operator==(const Heading&, const Heading&) = default;
};

struct Paragraph {
  std::string id;
  int num = 0;
  std::string text;
  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

using BodyElement = std::variant<Heading, Paragraph>;

struct GrantDocument {
  /// Country + number (leading zeros dropped) + kind, e.g. "US10842211B2".
  std::string doc_number;
  std::string title;
  std::vector<BodyElement> body;
  int year = 0;
};

enum class TagClass { AEI, TP, SP };

std::string_view to_string(TagClass tag);
TagClass tag_class_from_string(std::string_view name);

struct TaggedSegment {
  TagClass tag = TagClass::AEI;
  std::vector<std::string> paragraphs;
  std::size_t paragraph_count = 0;
  std::string source_doc;
};

/// Year encoded in an `ipgYYMMDD` file name, if it follows that convention.
std::optional<int> year_from_bulk_name(std::string_view name);

/// Returns the XML payload: the content itself, or the first `.xml` member
/// when the content is a zip archive. Throws NotAnArchive on a corrupt zip.
std::string unwrap_bulk_content(const RawBulkFile& file);

/// Splits a concatenation of standalone XML documents at each `<?xml`
/// declaration that starts a line. Concatenating the chunks reproduces the
/// (decompressed) input exactly. Empty input yields no chunks; input that
/// does not begin with a declaration throws MalformedConcatenation.
std::vector<std::string> split_bulk_file(const RawBulkFile& file);

/// Streaming variant: reads line by line and hands each document to `sink`
/// as soon as the next declaration (or end of input) is seen.
void for_each_document(std::istream& in, const std::function<void(std::string&&)>& sink);

/// Streaming SAX parse of one grant. Headings and `<p>` elements are taken
/// from the description in document order; text inside tables, maths,
/// chemistry and images is skipped. `fallback_year` is used when the
/// publication date is missing.
GrantDocument parse_grant(std::string_view xml_text, std::optional<int> fallback_year = std::nullopt);

/// Text of every `<p>` element in arbitrary XML, with the same skipping rules.
std::vector<std::string> extract_paragraphs(std::string_view xml_text);

/// Lowercase, punctuation to spaces, whitespace collapsed.
std::string normalize_heading(std::string_view heading_text);

class HeadingMatcher {
 public:
  /// The default pattern set.
  HeadingMatcher();
  /// Replaces all patterns for `tag` (patterns are normalized on insert).
  void set_patterns(TagClass tag, const std::vector<std::string>& patterns);
  std::optional<TagClass> match(std::string_view heading_text) const;
  std::vector<std::pair<std::string, TagClass>> patterns() const;

 private:
  std::vector<std::pair<std::string, TagClass>> patterns_;
};

std::optional<TagClass> match_heading(std::string_view heading_text, const HeadingMatcher& matcher = {});

/// One segment per matched heading, holding the paragraphs up to the next
/// heading of any kind.
std::vector<TaggedSegment> extract_tagged_segments(const GrantDocument& doc, const HeadingMatcher& matcher = {});

/// Debug dump record: {doc_number, title, tag, paragraphs, year}.
nlohmann::json segment_to_json(const TaggedSegment& segment, const GrantDocument& doc);

RawBulkFile read_bulk_file(const std::filesystem::path& path);

}  // namespace patent::ingest
