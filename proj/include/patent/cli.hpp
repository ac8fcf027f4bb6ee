#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "patent/corpus.hpp"
#include "patent/eval.hpp"
#include "patent/explain.hpp"
#include "patent/ingest.hpp"
#include "patent/models.hpp"
#include "patent/text.hpp"

namespace patent::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Every tunable default in one place. Loaded from an INI-style file; the
/// keys are documented in docs/config.md. Command-line flags override it.
struct AppConfig {
  corpus::CorpusConfig corpus;
  text::NgramConfig ngram;
  std::optional<std::filesystem::path> stopwords_path;
  models::TrainConfig train;
  eval::SplitSpec split;
  ingest::HeadingMatcher headings;
  std::size_t folds = 5;
  explain::SurrogateOptions surrogate;
  /// Highlight colors indexed by TagClass (AEI, TP, SP).
  std::array<std::string, 3> tag_colors = {"#c6efce", "#ffc7ce", "#e0e0e0"};

  text::Stoplist stoplist() const;
  /// Applies one seed to corpus balancing, splitting, training and sampling.
  void set_seed(std::uint64_t seed);
};

AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& content);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace patent::cli
