#include "patent/ingest.hpp"

#include <expat.h>
#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "patent/error.hpp"

namespace patent::ingest {

std::string_view to_string(TagClass tag) {
  switch (tag) {
    case TagClass::AEI: return "AEI";
    case TagClass::TP: return "TP";
    case TagClass::SP: return "SP";
  }
  return "AEI";
}

TagClass tag_class_from_string(std::string_view name) {
  if (name == "AEI" || name == "aei") return TagClass::AEI;
  if (name == "TP" || name == "tp") return TagClass::TP;
  if (name == "SP" || name == "sp") return TagClass::SP;
  throw Error(Errc::BadArgument, "unknown tag class '" + std::string(name) + "'");
}

std::optional<int> year_from_bulk_name(std::string_view name) {
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  if (name.size() < 9 || name.substr(0, 3) != "ipg") return std::nullopt;
  for (std::size_t i = 3; i < 9; ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
  }
  return 2000 + (name[3] - '0') * 10 + (name[4] - '0');
}

// ---------------------------------------------------------------------------
// zip

namespace {

std::uint32_t read_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint16_t read_u16(std::string_view s, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

bool is_zip(std::string_view content) { return content.size() >= 4 && content.substr(0, 2) == "PK"; }

std::string inflate_raw(std::string_view compressed, std::size_t expected_size) {
  std::string out(expected_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(Errc::NotAnArchive, "zlib initialisation failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected_size) {
    throw Error(Errc::NotAnArchive, "corrupt deflate stream in zip member");
  }
  return out;
}

std::string unzip_first_xml(std::string_view zip, const std::string& source) {
  constexpr std::size_t kEocdSize = 22;
  if (zip.size() < kEocdSize) throw Error(Errc::NotAnArchive, source + ": too short for a zip archive");
  std::size_t eocd = std::string_view::npos;
  const std::size_t floor = zip.size() > kEocdSize + 0xFFFF ? zip.size() - kEocdSize - 0xFFFF : 0;
  for (std::size_t at = zip.size() - kEocdSize + 1; at-- > floor;) {
    if (read_u32(zip, at) == 0x06054b50) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw Error(Errc::NotAnArchive, source + ": no end of central directory");

  const std::size_t entries = read_u16(zip, eocd + 10);
  std::size_t at = read_u32(zip, eocd + 16);
  for (std::size_t e = 0; e < entries; ++e) {
    if (at + 46 > zip.size() || read_u32(zip, at) != 0x02014b50) {
      throw Error(Errc::NotAnArchive, source + ": corrupt central directory");
    }
    const std::uint16_t method = read_u16(zip, at + 10);
    const std::uint32_t compressed_size = read_u32(zip, at + 20);
    const std::uint32_t size = read_u32(zip, at + 24);
    const std::size_t name_len = read_u16(zip, at + 28);
    const std::size_t extra_len = read_u16(zip, at + 30);
    const std::size_t comment_len = read_u16(zip, at + 32);
    const std::size_t local = read_u32(zip, at + 42);
    if (at + 46 + name_len > zip.size()) throw Error(Errc::NotAnArchive, source + ": corrupt entry name");
    std::string name(zip.substr(at + 46, name_len));
    at += 46 + name_len + extra_len + comment_len;

    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.size() < 4 || lower.substr(lower.size() - 4) != ".xml") continue;

    if (local + 30 > zip.size() || read_u32(zip, local) != 0x04034b50) {
      throw Error(Errc::NotAnArchive, source + ": corrupt local header for " + name);
    }
    const std::size_t data = local + 30 + read_u16(zip, local + 26) + read_u16(zip, local + 28);
    if (data + compressed_size > zip.size()) throw Error(Errc::NotAnArchive, source + ": truncated member " + name);
    const auto payload = zip.substr(data, compressed_size);
    if (method == 0) {
      if (compressed_size != size) throw Error(Errc::NotAnArchive, source + ": stored size mismatch");
      return std::string(payload);
    }
    if (method == 8) return inflate_raw(payload, size);
    throw Error(Errc::NotAnArchive, source + ": unsupported compression method " + std::to_string(method));
  }
  throw Error(Errc::NotAnArchive, source + ": archive holds no .xml member");
}

constexpr std::string_view kDeclaration = "<?xml";

}  // namespace

std::string unwrap_bulk_content(const RawBulkFile& file) {
  if (is_zip(file.content)) return unzip_first_xml(file.content, file.source_name);
  return file.content;
}

std::vector<std::string> split_bulk_file(const RawBulkFile& file) {
  const std::string content = unwrap_bulk_content(file);
  std::vector<std::string> chunks;
  if (content.empty()) return chunks;
  if (content.compare(0, kDeclaration.size(), kDeclaration) != 0) {
    throw Error(Errc::MalformedConcatenation, file.source_name + ": input does not start with an XML declaration");
  }
  std::size_t start = 0;
  std::size_t pos = 0;
  while ((pos = content.find(kDeclaration, pos + 1)) != std::string::npos) {
    if (content[pos - 1] != '\n') continue;
    chunks.push_back(content.substr(start, pos - start));
    start = pos;
  }
  chunks.push_back(content.substr(start));
  return chunks;
}

void for_each_document(std::istream& in, const std::function<void(std::string&&)>& sink) {
  std::string current;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const bool had_newline = !in.eof();
    if (first) {
      if (line.compare(0, kDeclaration.size(), kDeclaration) != 0) {
        throw Error(Errc::MalformedConcatenation, "input does not start with an XML declaration");
      }
      first = false;
    } else if (line.compare(0, kDeclaration.size(), kDeclaration) == 0) {
      sink(std::move(current));
      current.clear();
    }
    current += line;
    if (had_newline) current.push_back('\n');
  }
  if (!current.empty()) sink(std::move(current));
}

// ---------------------------------------------------------------------------
// XML

namespace {

bool is_skipped_element(std::string_view name) {
  return name == "tables" || name == "table" || name == "maths" || name == "math" || name == "chemistry" ||
         name == "chem" || name == "img" || name == "figure";
}

bool is_block_boundary(std::string_view name) {
  return name == "ul" || name == "ol" || name == "li" || name == "br" || name == "dl" || name == "dt" ||
         name == "dd" || name == "p";
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

const char* find_attribute(const XML_Char** attrs, std::string_view key) {
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    if (key == attrs[i]) return attrs[i + 1];
  }
  return nullptr;
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

class GrantHandler {
 public:
  enum class Mode { grant, paragraphs_only };

  explicit GrantHandler(Mode mode) : mode_(mode) {}

  void run(std::string_view xml) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
    if (!parser) throw Error(Errc::MalformedXml, "cannot create XML parser");
    XML_SetUserData(parser.get(), this);
    XML_SetElementHandler(parser.get(), &GrantHandler::on_start, &GrantHandler::on_end);
    XML_SetCharacterDataHandler(parser.get(), &GrantHandler::on_text);
    // Grants reference an external DTD we never load; entities it would
    // define are dropped instead of failing the parse.
    XML_SetSkippedEntityHandler(parser.get(), [](void*, const XML_Char*, int) {});
    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
      std::ostringstream msg;
      msg << XML_ErrorString(XML_GetErrorCode(parser.get())) << " at line "
          << XML_GetCurrentLineNumber(parser.get()) << ", byte offset " << XML_GetCurrentByteIndex(parser.get());
      throw Error(Errc::MalformedXml, msg.str());
    }
  }

  GrantDocument doc;
  std::vector<std::string> paragraphs;
  std::string country;
  std::string number;
  std::string kind;
  std::string date;

 private:
  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<GrantHandler*>(self)->start(name, attrs);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<GrantHandler*>(self)->end(name); }
  static void XMLCALL on_text(void* self, const XML_Char* text, int len) {
    static_cast<GrantHandler*>(self)->text(std::string_view(text, static_cast<std::size_t>(len)));
  }

  bool inside(std::string_view name) const {
    return std::find(stack_.begin(), stack_.end(), name) != stack_.end();
  }

  void start(std::string_view name, const XML_Char** attrs) {
    stack_.emplace_back(name);
    if (skip_depth_ > 0 || is_skipped_element(name)) {
      ++skip_depth_;
      return;
    }
    if (paragraph_depth_ > 0) {
      if (name == "p") ++paragraph_depth_;
      if (is_block_boundary(name)) buffer_.push_back(' ');
      return;
    }
    if (name == "p" && (mode_ == Mode::paragraphs_only || description_depth_ > 0)) {
      paragraph_depth_ = 1;
      buffer_.clear();
      paragraph_id_ = find_attribute(attrs, "id") ? find_attribute(attrs, "id") : "";
      const char* num = find_attribute(attrs, "num");
      paragraph_num_ = -1;
      if (num != nullptr) {
        try {
          paragraph_num_ = std::stoi(num);
        } catch (const std::exception&) {
          paragraph_num_ = -1;
        }
      }
      return;
    }
    if (mode_ == Mode::paragraphs_only) return;
    if (name == "description") {
      ++description_depth_;
    } else if (name == "heading" && description_depth_ > 0) {
      heading_depth_ = 1;
      buffer_.clear();
    } else if (heading_depth_ > 0) {
      ++heading_depth_;
    } else if (name == "invention-title" && doc.title.empty() && inside("us-bibliographic-data-grant")) {
      capture_ = &title_buffer_;
    } else if (inside("publication-reference") && !publication_done_) {
      if (name == "country") capture_ = &country;
      if (name == "doc-number") capture_ = &number;
      if (name == "kind") capture_ = &kind;
      if (name == "date") capture_ = &date;
    }
  }

  void end(std::string_view name) {
    stack_.pop_back();
    if (skip_depth_ > 0) {
      --skip_depth_;
      return;
    }
    if (paragraph_depth_ > 0) {
      if (is_block_boundary(name) && paragraph_depth_ > 1) buffer_.push_back(' ');
      if (name == "p" && --paragraph_depth_ == 0) finish_paragraph();
      return;
    }
    if (mode_ == Mode::paragraphs_only) return;
    if (heading_depth_ > 0) {
      if (--heading_depth_ == 0) doc.body.emplace_back(Heading{collapse_whitespace(buffer_)});
      return;
    }
    if (name == "description") --description_depth_;
    if (name == "document-id" && inside("publication-reference")) publication_done_ = true;
    if (capture_ == &title_buffer_ && name == "invention-title") doc.title = collapse_whitespace(title_buffer_);
    capture_ = nullptr;
  }

  void text(std::string_view chars) {
    if (skip_depth_ > 0) return;
    if (paragraph_depth_ > 0 || heading_depth_ > 0) {
      buffer_ += chars;
    } else if (capture_ != nullptr) {
      *capture_ += chars;
    }
  }

  void finish_paragraph() {
    auto text = collapse_whitespace(buffer_);
    if (mode_ == Mode::paragraphs_only) {
      paragraphs.push_back(std::move(text));
      return;
    }
    const int ordinal = static_cast<int>(std::count_if(doc.body.begin(), doc.body.end(), [](const BodyElement& e) {
      return std::holds_alternative<Paragraph>(e);
    }));
    doc.body.emplace_back(Paragraph{paragraph_id_, paragraph_num_ >= 0 ? paragraph_num_ : ordinal, std::move(text)});
  }

  Mode mode_;
  std::vector<std::string> stack_;
  int skip_depth_ = 0;
  int paragraph_depth_ = 0;
  int heading_depth_ = 0;
  int description_depth_ = 0;
  bool publication_done_ = false;
  std::string buffer_;
  std::string title_buffer_;
  std::string paragraph_id_;
  int paragraph_num_ = -1;
  std::string* capture_ = nullptr;
};

std::string trim(std::string_view s) { return collapse_whitespace(s); }

}  // namespace

GrantDocument parse_grant(std::string_view xml_text, std::optional<int> fallback_year) {
  GrantHandler handler(GrantHandler::Mode::grant);
  handler.run(xml_text);
  auto doc = std::move(handler.doc);
  const auto number = trim(handler.number);
  if (number.empty()) throw Error(Errc::MissingDocNumber, "grant has no publication doc-number");
  std::string digits = number;
  if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const auto first = digits.find_first_not_of('0');
    digits = first == std::string::npos ? "0" : digits.substr(first);
  }
  doc.doc_number = trim(handler.country) + digits + trim(handler.kind);
  const auto date = trim(handler.date);
  if (date.size() >= 4 && std::all_of(date.begin(), date.begin() + 4, [](char c) { return c >= '0' && c <= '9'; })) {
    doc.year = std::stoi(date.substr(0, 4));
  } else {
    doc.year = fallback_year.value_or(0);
  }
  return doc;
}

std::vector<std::string> extract_paragraphs(std::string_view xml_text) {
  GrantHandler handler(GrantHandler::Mode::paragraphs_only);
  handler.run(xml_text);
  return std::move(handler.paragraphs);
}

// ---------------------------------------------------------------------------
// headings and segments

std::string normalize_heading(std::string_view heading_text) {
  std::string cleaned;
  cleaned.reserve(heading_text.size());
  for (const char ch : heading_text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      cleaned.push_back(static_cast<char>(c | 0x20));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      cleaned.push_back(ch);
    } else {
      cleaned.push_back(' ');
    }
  }
  return collapse_whitespace(cleaned);
}

HeadingMatcher::HeadingMatcher() {
  set_patterns(TagClass::AEI, {"advantageous effects of invention", "advantageous effects"});
  set_patterns(TagClass::TP, {"technical problem", "technical problems"});
  set_patterns(TagClass::SP, {"solution to problem", "solutions to problem", "solution to the problem"});
}

void HeadingMatcher::set_patterns(TagClass tag, const std::vector<std::string>& patterns) {
  std::erase_if(patterns_, [tag](const auto& p) { return p.second == tag; });
  for (const auto& pattern : patterns) {
    auto normalized = normalize_heading(pattern);
    if (normalized.empty()) continue;
    if (std::any_of(patterns_.begin(), patterns_.end(), [&](const auto& p) { return p.first == normalized; })) {
      throw Error(Errc::BadArgument, "heading pattern '" + pattern + "' assigned to two tags");
    }
    patterns_.emplace_back(std::move(normalized), tag);
  }
}

std::optional<TagClass> HeadingMatcher::match(std::string_view heading_text) const {
  const auto normalized = normalize_heading(heading_text);
  for (const auto& [pattern, tag] : patterns_) {
    if (pattern == normalized) return tag;
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, TagClass>> HeadingMatcher::patterns() const { return patterns_; }

std::optional<TagClass> match_heading(std::string_view heading_text, const HeadingMatcher& matcher) {
  return matcher.match(heading_text);
}

std::vector<TaggedSegment> extract_tagged_segments(const GrantDocument& doc, const HeadingMatcher& matcher) {
  std::vector<TaggedSegment> segments;
  TaggedSegment* open = nullptr;
  for (const auto& element : doc.body) {
    if (const auto* heading = std::get_if<Heading>(&element)) {
      open = nullptr;
      if (const auto tag = matcher.match(heading->text)) {
        segments.push_back(TaggedSegment{*tag, {}, 0, doc.doc_number});
        open = &segments.back();
      }
    } else if (open != nullptr) {
      open->paragraphs.push_back(std::get<Paragraph>(element).text);
      open->paragraph_count = open->paragraphs.size();
    }
  }
  return segments;
}

nlohmann::json segment_to_json(const TaggedSegment& segment, const GrantDocument& doc) {
  return {{"doc_number", doc.doc_number},
          {"title", doc.title},
          {"tag", std::string(to_string(segment.tag))},
          {"paragraphs", segment.paragraphs},
          {"year", doc.year}};
}

RawBulkFile read_bulk_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open bulk file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return RawBulkFile{path.filename().string(), buffer.str()};
}

}  // namespace patent::ingest
