#include "patent/error.hpp"

namespace patent {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotAnArchive: return "NotAnArchive";
    case Errc::MalformedConcatenation: return "MalformedConcatenation";
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::MissingDocNumber: return "MissingDocNumber";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::IoFailure: return "IoFailure";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::BadLabel: return "BadLabel";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::NonPositiveAlpha: return "NonPositiveAlpha";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::BadFraction: return "BadFraction";
    case Errc::BadK: return "BadK";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::DegenerateText: return "DegenerateText";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

}  // namespace patent
