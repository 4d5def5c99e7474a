#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revmine/analytics.hpp"
#include "revmine/evalkit.hpp"
#include "revmine/io.hpp"

// Command-line front end. Subcommands: ingest, stats, train, predict,
// evaluate, crossval, report, synth. Flags override config-file values; the
// effective configuration is echoed into the output directory so any run
// can be replayed.

namespace revmine::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

struct RunConfig {
  std::vector<std::string> inputs;
  Format format = Format::Csv;
  Schema schema;
  Task task = Task::Rubric;
  double alpha = 1.0;
  FeatureKind feature_kind = FeatureKind::TokenCounts;
  std::size_t min_frequency = 1;
  double sentiment_epsilon = kDefaultSentimentEpsilon;
  std::string positive_class;
  double train_fraction = 0.8;
  std::size_t folds = 10;
  bool stratified = true;
  std::optional<std::uint64_t> seed;  // required by randomized commands
  std::string lexicon;   // empty means the bundled lexicon
  std::string out = ".";
  std::vector<ReportFormat> report_formats{ReportFormat::Json};
  bool include_length = false;  // length column in correlation reports

  // Command-specific paths and inline inputs.
  std::string model;
  std::string vocabulary;
  std::string genspec;
  std::string text;
  std::string salt;
  std::optional<std::pair<int, int>> score_range;
};

// Key=value lines, '#' comments. Throws ConfigError naming the line.
RunConfig load_config(const std::string& path);

// Returns an exit code, never throws: 0 success, 1 usage or configuration
// error, 2 data or validation error, 3 internal error. argv excludes the
// program name.
int run(const std::vector<std::string>& argv);
int run(int argc, const char* const* argv);

}  // namespace revmine::cli
