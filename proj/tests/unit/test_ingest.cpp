#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "patent/error.hpp"
#include "patent/ingest.hpp"
#include "support/oracles.hpp"

using namespace patent;
using namespace patent::ingest;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string minimal_grant(const std::string& number, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<us-patent-grant><us-bibliographic-data-grant><publication-reference><document-id>"
         "<country>US</country><doc-number>" +
         number +
         "</doc-number><kind>B2</kind><date>20190305</date></document-id></publication-reference>"
         "<invention-title>Widget</invention-title></us-bibliographic-data-grant>"
         "<description>" +
         body + "</description></us-patent-grant>\n";
}

}  // namespace

TEST_CASE("split_bulk_file: two documents, exact reassembly") {
  const std::string a = minimal_grant("1234567", "<p id=\"p-0001\" num=\"0001\">x</p>");
  const std::string b = minimal_grant("7654321", "");
  const auto chunks = split_bulk_file({"ipg190305.xml", a + b});
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0] == a);
  CHECK(chunks[1] == b);
  for (const auto& c : chunks) CHECK(c.rfind("<?xml", 0) == 0);
}

TEST_CASE("split_bulk_file: empty input and missing declaration") {
  CHECK(split_bulk_file({"ipg190305.xml", ""}).empty());
  CHECK_THROWS_AS(split_bulk_file({"ipg190305.xml", "<us-patent-grant/>"}), Error);
  try {
    split_bulk_file({"x.xml", "garbage"});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedConcatenation);
  }
}

TEST_CASE("split_bulk_file: fixture layout, doc numbers found by plain text search") {
  const auto raw = read_bulk_file(testing::fixture_dir() / "ipg200107.xml");
  const auto chunks = split_bulk_file(raw);
  REQUIRE(chunks.size() == 3);
  std::string joined;
  for (const auto& c : chunks) joined += c;
  CHECK(joined == raw.content);
  const std::vector<std::string> numbers = {"10842211", "09855011", "10528001"};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(chunks[i].find("<doc-number>" + numbers[i] + "</doc-number>") != std::string::npos);
    const auto doc = parse_grant(chunks[i]);
    const auto digits = doc.doc_number.substr(2, doc.doc_number.size() - 4);
    CHECK(numbers[i].find(digits) != std::string::npos);
    CHECK(chunks[i].find(digits) != std::string::npos);
  }
}

TEST_CASE("for_each_document streams the same chunks") {
  const auto raw = read_bulk_file(testing::fixture_dir() / "ipg200107.xml");
  std::istringstream in(raw.content);
  std::vector<std::string> streamed;
  for_each_document(in, [&](std::string&& doc) { streamed.push_back(std::move(doc)); });
  CHECK(streamed == split_bulk_file(raw));
}

TEST_CASE("zip-wrapped bulk file unwraps to the same XML") {
  const auto xml = read_bulk_file(testing::fixture_dir() / "ipg200107.xml");
  const auto zipped = read_bulk_file(testing::fixture_dir() / "zip" / "ipg200107.zip");
  CHECK(unwrap_bulk_content(zipped) == xml.content);
  CHECK(split_bulk_file(zipped) == split_bulk_file(xml));
  const auto stored = read_bulk_file(testing::fixture_dir() / "zip" / "ipg200114.zip");
  CHECK(unwrap_bulk_content(stored) == xml.content);
}

TEST_CASE("corrupt zip is NotAnArchive") {
  auto zipped = read_bulk_file(testing::fixture_dir() / "zip" / "ipg200107.zip");
  zipped.content.resize(zipped.content.size() / 2);
  try {
    unwrap_bulk_content(zipped);
    FAIL("expected NotAnArchive");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotAnArchive);
  }
}

TEST_CASE("parse_grant: paragraph attributes and document order") {
  const auto doc = parse_grant(minimal_grant(
      "10842211", "<heading id=\"h-1\">Technical Problem</heading>"
                  "<p id=\"p-0021\" num=\"0020\">first <b>bold</b> text</p>"
                  "<p id=\"p-0022\" num=\"0021\">second</p>"
                  "<heading id=\"h-2\">Advantageous Effects</heading>"
                  "<p id=\"p-0023\" num=\"0022\">third</p>"));
  CHECK(doc.doc_number == "US10842211B2");
  CHECK(doc.title == "Widget");
  CHECK(doc.year == 2019);
  REQUIRE(doc.body.size() == 5);
  CHECK(std::holds_alternative<Heading>(doc.body[0]));
  CHECK(std::get<Paragraph>(doc.body[1]) == Paragraph{"p-0021", 20, "first bold text"});
  CHECK(std::get<Paragraph>(doc.body[2]) == Paragraph{"p-0022", 21, "second"});
  CHECK(std::get<Heading>(doc.body[3]).text == "Advantageous Effects");
  CHECK(std::get<Paragraph>(doc.body[4]).num == 22);
}

TEST_CASE("parse_grant: empty body, fallback year, errors") {
  std::string no_date = minimal_grant("1234567", "");
  no_date.replace(no_date.find("<date>"), std::string("<date>20190305</date>").size(), "");
  const auto doc = parse_grant(no_date, 2016);
  CHECK(doc.body.empty());
  CHECK(doc.year == 2016);
  CHECK(doc.doc_number == "US1234567B2");

  try {
    parse_grant("<?xml version=\"1.0\"?>\n<us-patent-grant><description></us-patent-grant>");
    FAIL("expected MalformedXml");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedXml);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  try {
    parse_grant("<?xml version=\"1.0\"?>\n<us-patent-grant><description/></us-patent-grant>");
    FAIL("expected MissingDocNumber");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingDocNumber);
  }
}

TEST_CASE("parse_grant is deterministic") {
  const auto raw = read_bulk_file(testing::fixture_dir() / "ipg200107.xml");
  for (const auto& chunk : split_bulk_file(raw)) {
    const auto a = parse_grant(chunk);
    const auto b = parse_grant(chunk);
    CHECK(a.doc_number == b.doc_number);
    CHECK(a.body == b.body);
  }
}

TEST_CASE("match_heading: defaults, variants, non-targets") {
  CHECK(match_heading("Advantageous Effects of Invention") == TagClass::AEI);
  CHECK(match_heading("BACKGROUND") == std::nullopt);
  CHECK(match_heading("Technical  problem") == TagClass::TP);
  CHECK(match_heading("SOLUTION TO THE PROBLEM") == TagClass::SP);
  CHECK(match_heading("Technical Problems:") == TagClass::TP);
  CHECK(match_heading("") == std::nullopt);
  CHECK(normalize_heading("  Solution-to   Problem. ") == "solution to problem");
}

TEST_CASE("HeadingMatcher patterns are configurable") {
  HeadingMatcher m;
  m.set_patterns(TagClass::SP, {"Means for Solving the Problem"});
  CHECK(m.match("MEANS FOR SOLVING THE PROBLEM") == TagClass::SP);
  CHECK(m.match("Solution to Problem") == std::nullopt);
  CHECK(m.match("Technical Problem") == TagClass::TP);
}

TEST_CASE("extract_tagged_segments: collection rule") {
  GrantDocument doc;
  doc.doc_number = "US1B1";
  doc.body = {Heading{"Advantageous Effects"}, Paragraph{"p1", 1, "P1"}, Paragraph{"p2", 2, "P2"},
              Heading{"Other"}, Paragraph{"p3", 3, "P3"}};
  auto segs = extract_tagged_segments(doc);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].tag == TagClass::AEI);
  CHECK(segs[0].paragraphs == std::vector<std::string>{"P1", "P2"});
  CHECK(segs[0].paragraph_count == 2);
  CHECK(segs[0].source_doc == "US1B1");

  doc.body = {Heading{"Advantageous Effects"}, Heading{"Technical Problem"}, Paragraph{"p1", 1, "X"}};
  segs = extract_tagged_segments(doc);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].tag == TagClass::AEI);
  CHECK(segs[0].paragraph_count == 0);
  CHECK(segs[1].tag == TagClass::TP);
  CHECK(segs[1].paragraphs == std::vector<std::string>{"X"});

  doc.body = {Heading{"Background"}, Paragraph{"p1", 1, "X"}};
  CHECK(extract_tagged_segments(doc).empty());
}

TEST_CASE("fixture extracts exactly the golden segments") {
  const auto raw = read_bulk_file(testing::fixture_dir() / "ipg200107.xml");
  std::vector<std::string> produced;
  for (const auto& chunk : split_bulk_file(raw)) {
    const auto doc = parse_grant(chunk, year_from_bulk_name(raw.source_name));
    for (const auto& seg : extract_tagged_segments(doc)) produced.push_back(segment_to_json(seg, doc).dump());
  }
  std::ifstream golden(testing::fixture_dir() / "golden_segments.ndjson");
  std::vector<std::string> expected;
  for (std::string line; std::getline(golden, line);) {
    if (!line.empty()) expected.push_back(nlohmann::json::parse(line).dump());
  }
  CHECK(produced == expected);
}

TEST_CASE("year_from_bulk_name") {
  CHECK(year_from_bulk_name("ipg200107.xml") == 2020);
  CHECK(year_from_bulk_name("ipg101228.zip") == 2010);
  CHECK(year_from_bulk_name("grants.xml") == std::nullopt);
}

TEST_CASE("extract_paragraphs skips tables") {
  const auto ps = extract_paragraphs("<root><p>a <table><row><entry>9</entry></row></table>b</p><p>c</p></root>");
  REQUIRE(ps.size() == 2);
  CHECK(ps[0] == "a b");
  CHECK(ps[1] == "c");
}
