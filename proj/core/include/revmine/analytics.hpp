#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revmine/corpus.hpp"
#include "revmine/evalkit.hpp"
#include "revmine/textproc.hpp"

// Descriptive reporting: yearly trends, aggregate POS distribution, Pearson
// correlation matrices over per-comment POS counts, per-rubric-category
// prediction scores, and deterministic report emission.

namespace revmine {

struct TrendSeries {
  std::string metric;
  std::vector<std::pair<int, double>> points;  // years strictly increasing
};

// Per-year token totals; years with no data appear as zeros within the
// corpus span. The total equals stats(corpus).total_words.
TrendSeries yearly_word_counts(const Corpus& corpus);
TrendSeries yearly_comment_counts(const Corpus& corpus);

struct PosDistribution {
  PosProfile totals;
  // Absent when the corpus has no tokens; otherwise sums to 1.
  std::optional<std::array<double, kPosTagCount>> proportions;
};

PosDistribution pos_distribution(const Corpus& corpus,
                                 const Lexicon& lexicon);

// Product-moment correlation; absent when either series is constant.
// Requires |x| = |y| >= 2.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> variable_names;
  // Row-major, symmetric; absent cells mark zero-variance variables.
  std::vector<std::optional<double>> values;

  std::optional<double> at(std::size_t i, std::size_t j) const {
    return values[i * variable_names.size() + j];
  }
};

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

CorrelationMatrix correlation_matrix(std::span<const NamedSeries> columns);

// Columns are per-comment counts of noun, verb, adjective, adverb, with an
// optional comment-length column.
CorrelationMatrix pos_correlation_matrix(const Corpus& corpus,
                                         const Lexicon& lexicon,
                                         bool include_length = false);

struct RubricCategoryScore {
  // One-vs-rest cross-validated accuracy; absent when the category never
  // occurs in the corpus.
  std::optional<double> score;
  std::optional<ConfusionMatrix> aggregate;
};

struct RubricReport {
  std::array<RubricCategoryScore, kRubricCategoryCount> categories;
  std::optional<RubricCategory> best;
  std::vector<std::string> warnings;
};

// One-vs-rest evaluation per category over the same instances and plan;
// plan.size() must equal the rubric instance count.
RubricReport rubric_report(const Corpus& corpus, const PipelineConfig& config,
                           const FoldPlan& plan, const Lexicon& lexicon);

enum class ReportFormat : std::uint8_t { Json = 0, Csv, Text };

std::string_view to_string(ReportFormat f);
std::optional<ReportFormat> parse_report_format(std::string_view name);

// POS correlations from earlier course offerings landed in this band; it is
// echoed in reports as context, never asserted against data.
inline constexpr std::pair<double, double> kPosCorrelationReferenceBand{0.82,
                                                                        0.87};

struct ReportBundle {
  CorpusStats corpus_stats;
  TrendSeries words_by_year;
  TrendSeries comments_by_year;
  PosDistribution pos;
  CorrelationMatrix correlations;
  std::optional<RubricReport> rubric;
  std::vector<std::string> warnings;
};

ReportBundle build_report(const Corpus& corpus, const Lexicon& lexicon,
                          bool include_length_column = false);

// Writes report.json, per-figure CSVs, or report.txt under `destination`
// and returns the paths written. Output bytes depend only on the bundle.
std::vector<std::filesystem::path> emit_report(
    const ReportBundle& bundle, ReportFormat format,
    const std::filesystem::path& destination);

}  // namespace revmine
