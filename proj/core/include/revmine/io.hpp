#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "revmine/corpus.hpp"

// Corpus ingestion and export. CSV is row per (review, comment, rubric
// entry) triple with reviews spanning multiple rows; JSONL is one review
// object per line. Export mirrors ingest, so round-trips are structural
// identities.

namespace revmine {

enum class Format : std::uint8_t { Csv = 0, Jsonl };

std::string_view to_string(Format f);
std::optional<Format> parse_format(std::string_view name);

// Logical field -> column (CSV) or key (JSONL top level) names.
struct Schema {
  std::string review_id = "review_id";
  std::string reviewer = "reviewer";
  std::string reviewee = "reviewee";
  std::string year = "year";
  std::string semester = "semester";
  std::string comment_id = "comment_id";
  std::string text = "text";
  std::string sentiment = "sentiment";            // optional column
  std::string label = "label";                    // optional column
  std::string rubric_category = "rubric_category";  // optional column pair
  std::string rubric_score = "rubric_score";
};

struct IngestOptions {
  // Declared year span; defaults to the observed min/max years.
  std::optional<std::pair<int, int>> year_span;
  std::pair<int, int> score_range{1, 5};
  // When set, ingestion rejects corpora with invariant violations
  // (DataError). Off, it returns the corpus as parsed so violations can be
  // reported as data.
  bool validate = true;
};

// Throws ParseError (line and field) on malformed input, DataError when
// validation finds violations.
Corpus ingest(std::istream& in, Format format, const Schema& schema = {},
              const IngestOptions& options = {});
Corpus ingest_csv(std::istream& in, const Schema& schema = {},
                  const IngestOptions& options = {});
Corpus ingest_jsonl(std::istream& in, const Schema& schema = {},
                    const IngestOptions& options = {});

void export_corpus(const Corpus& corpus, std::ostream& out, Format format,
                   const Schema& schema = {});
void export_csv(const Corpus& corpus, std::ostream& out,
                const Schema& schema = {});
void export_jsonl(const Corpus& corpus, std::ostream& out,
                  const Schema& schema = {});

}  // namespace revmine
