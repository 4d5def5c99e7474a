#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Peer-review data model: reviews with rubric scores and free-text comments,
// plus validation, anonymization and descriptive statistics.

namespace revmine {

// ---------------------------------------------------------------------------
// Enumerations

enum class RubricCategory : std::uint8_t {
  ClearLabeling = 0,
  LieFactor,
  DataInkRatio,
  ChartJunk,
  GestaltPrinciples,
};

inline constexpr std::size_t kRubricCategoryCount = 5;

std::string_view to_string(RubricCategory c);
std::optional<RubricCategory> parse_rubric_category(std::string_view name);
// "clear_labeling, lie_factor, data_ink_ratio, chart_junk,
//  gestalt_principles" for error messages.
std::string rubric_category_names();

enum class Semester : std::uint8_t { Fall = 0, Spring };

std::string_view to_string(Semester s);
std::optional<Semester> parse_semester(std::string_view name);

// ---------------------------------------------------------------------------
// Records

struct RubricScore {
  RubricCategory category = RubricCategory::ClearLabeling;
  int score = 0;

  bool operator==(const RubricScore&) const = default;
};

struct Comment {
  std::string id;
  std::string review_id;
  std::string text;
  std::optional<double> sentiment_score;  // in [-1, 1] when present
  std::string label;  // ground-truth class, empty when unlabeled

  bool operator==(const Comment&) const = default;
};

struct Review {
  std::string id;
  std::string reviewer;
  std::string reviewee;
  int year = 0;
  Semester semester = Semester::Fall;
  std::vector<RubricScore> rubric_scores;  // at most one per category
  std::vector<Comment> comments;

  bool operator==(const Review&) const = default;
};

struct Corpus {
  std::vector<Review> reviews;
  std::pair<int, int> year_span{0, 0};   // inclusive
  std::pair<int, int> score_range{1, 5};  // inclusive

  bool operator==(const Corpus&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind : std::uint8_t {
  SelfReview = 0,
  YearOutOfSpan,
  DuplicateRubricCategory,
  ScoreOutOfRange,
  EmptyCommentText,
  SentimentOutOfRange,
  DuplicateReviewId,
  CommentReviewMismatch,
};

struct Violation {
  ViolationKind kind;
  std::size_t record_position;  // review index in input order
  std::string record_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Violations ordered by record position, then by field within the record.
ValidationReport validate(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Anonymization

// Replaces reviewer/reviewee ids with keyed-hash pseudonyms (12 hex chars).
// Same (id, salt) always maps to the same pseudonym. Throws
// std::invalid_argument on empty salt.
Corpus anonymize(const Corpus& corpus, std::string_view salt);

// ---------------------------------------------------------------------------
// Descriptive statistics

struct CorpusStats {
  std::size_t total_reviews = 0;
  std::size_t total_comments = 0;
  std::size_t total_words = 0;
  std::optional<double> mean_words_per_review;  // absent for empty corpora
  std::map<int, std::size_t> words_by_year;
  std::map<int, std::size_t> comments_by_year;
};

// Word counts use the textproc tokenizer, so they match feature extraction.
CorpusStats stats(const Corpus& corpus);

}  // namespace revmine
