#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patent {

enum class Errc {
  NotAnArchive,
  MalformedConcatenation,
  MalformedXml,
  MissingDocNumber,
  EmptyClass,
  IoFailure,
  SchemaMismatch,
  BadLabel,
  EmptyCorpus,
  NonPositiveAlpha,
  DimensionMismatch,
  VersionMismatch,
  CorruptFile,
  BadFraction,
  BadK,
  LengthMismatch,
  UnknownLabel,
  DegenerateText,
  EmptyInput,
  BadArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace patent
