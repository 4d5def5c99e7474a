#include "revmine/corpus.hpp"

#include <openssl/hmac.h>

#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "revmine/textproc.hpp"

namespace revmine {

namespace {

bool is_blank(std::string_view text) {
  for (const char c : text) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(RubricCategory c) {
  switch (c) {
    case RubricCategory::ClearLabeling: return "clear_labeling";
    case RubricCategory::LieFactor: return "lie_factor";
    case RubricCategory::DataInkRatio: return "data_ink_ratio";
    case RubricCategory::ChartJunk: return "chart_junk";
    case RubricCategory::GestaltPrinciples: return "gestalt_principles";
  }
  return "clear_labeling";
}

std::optional<RubricCategory> parse_rubric_category(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "clear_labeling") return RubricCategory::ClearLabeling;
  if (n == "lie_factor") return RubricCategory::LieFactor;
  if (n == "data_ink_ratio") return RubricCategory::DataInkRatio;
  if (n == "chart_junk") return RubricCategory::ChartJunk;
  if (n == "gestalt_principles") return RubricCategory::GestaltPrinciples;
  return std::nullopt;
}

std::string rubric_category_names() {
  std::string out;
  for (std::size_t i = 0; i < kRubricCategoryCount; ++i) {
    if (i) out += ", ";
    out += to_string(static_cast<RubricCategory>(i));
  }
  return out;
}

std::string_view to_string(Semester s) {
  return s == Semester::Fall ? "Fall" : "Spring";
}

std::optional<Semester> parse_semester(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "fall") return Semester::Fall;
  if (n == "spring") return Semester::Spring;
  return std::nullopt;
}

ValidationReport validate(const Corpus& corpus) {
  ValidationReport report;
  const auto add = [&](ViolationKind kind, std::size_t pos,
                       const std::string& id, std::string message) {
    report.violations.push_back({kind, pos, id, std::move(message)});
  };
  std::unordered_set<std::string> seen_ids;
  for (std::size_t pos = 0; pos < corpus.reviews.size(); ++pos) {
    const Review& review = corpus.reviews[pos];
    if (!seen_ids.insert(review.id).second) {
      add(ViolationKind::DuplicateReviewId, pos, review.id,
          "duplicate review id '" + review.id + "'");
    }
    if (review.reviewer == review.reviewee) {
      add(ViolationKind::SelfReview, pos, review.id,
          "review '" + review.id + "': reviewer and reviewee are both '" +
              review.reviewer + "'");
    }
    if (review.year < corpus.year_span.first ||
        review.year > corpus.year_span.second) {
      add(ViolationKind::YearOutOfSpan, pos, review.id,
          "review '" + review.id + "': year " + std::to_string(review.year) +
              " outside declared span " +
              std::to_string(corpus.year_span.first) + ".." +
              std::to_string(corpus.year_span.second));
    }
    std::set<RubricCategory> seen_categories;
    for (const RubricScore& rs : review.rubric_scores) {
      if (!seen_categories.insert(rs.category).second) {
        add(ViolationKind::DuplicateRubricCategory, pos, review.id,
            "review '" + review.id + "': duplicate rubric category '" +
                std::string(to_string(rs.category)) + "'");
      }
      if (rs.score < corpus.score_range.first ||
          rs.score > corpus.score_range.second) {
        add(ViolationKind::ScoreOutOfRange, pos, review.id,
            "review '" + review.id + "': score " + std::to_string(rs.score) +
                " for '" + std::string(to_string(rs.category)) +
                "' outside declared range " +
                std::to_string(corpus.score_range.first) + ".." +
                std::to_string(corpus.score_range.second));
      }
    }
    for (const Comment& comment : review.comments) {
      if (comment.review_id != review.id) {
        add(ViolationKind::CommentReviewMismatch, pos, review.id,
            "comment '" + comment.id + "' carries review_id '" +
                comment.review_id + "' inside review '" + review.id + "'");
      }
      if (is_blank(comment.text)) {
        add(ViolationKind::EmptyCommentText, pos, review.id,
            "comment '" + comment.id + "' in review '" + review.id +
                "' has empty text");
      }
      if (comment.sentiment_score &&
          !(*comment.sentiment_score >= -1.0 &&
            *comment.sentiment_score <= 1.0)) {
        add(ViolationKind::SentimentOutOfRange, pos, review.id,
            "comment '" + comment.id + "' in review '" + review.id +
                "' has sentiment outside [-1, 1]");
      }
    }
  }
  return report;
}

namespace {

// Keyed-hash pseudonym, truncated to 12 hex chars.
std::string pseudonym(std::string_view id, std::string_view salt) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
       reinterpret_cast<const unsigned char*>(id.data()), id.size(), digest,
       &digest_len);
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(12);
  for (std::size_t i = 0; i < 6; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0F]);
  }
  return out;
}

}  // namespace

Corpus anonymize(const Corpus& corpus, std::string_view salt) {
  if (salt.empty()) {
    throw std::invalid_argument("anonymize requires a non-empty salt");
  }
  Corpus out = corpus;
  for (Review& review : out.reviews) {
    review.reviewer = pseudonym(review.reviewer, salt);
    review.reviewee = pseudonym(review.reviewee, salt);
  }
  return out;
}

CorpusStats stats(const Corpus& corpus) {
  CorpusStats s;
  s.total_reviews = corpus.reviews.size();
  for (const Review& review : corpus.reviews) {
    for (const Comment& comment : review.comments) {
      const std::size_t words = tokenize(comment.text).size();
      s.total_comments += 1;
      s.total_words += words;
      s.words_by_year[review.year] += words;
      s.comments_by_year[review.year] += 1;
    }
  }
  if (s.total_reviews > 0) {
    s.mean_words_per_review = static_cast<double>(s.total_words) /
                              static_cast<double>(s.total_reviews);
  }
  return s;
}

}  // namespace revmine
