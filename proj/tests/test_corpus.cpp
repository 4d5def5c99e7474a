#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "revmine/corpus.hpp"
#include "revmine/error.hpp"
#include "revmine/synth.hpp"
#include "revmine/textproc.hpp"
#include "testutil.hpp"

using namespace revmine;
using testutil::make_corpus;
using testutil::make_review;

namespace {

std::vector<ViolationKind> kinds(const ValidationReport& report) {
  std::vector<ViolationKind> out;
  for (const auto& v : report.violations) out.push_back(v.kind);
  return out;
}

GenSpec tiny_spec() {
  GenSpec spec;
  spec.class_labels = {"neg", "pos"};
  spec.class_priors = {0.5, 0.5};
  spec.vocabulary = {"awful", "bad", "fine", "good"};
  spec.token_distributions = {{0.45, 0.45, 0.05, 0.05},
                              {0.05, 0.05, 0.45, 0.45}};
  spec.total_comments = 60;
  spec.mean_comment_length = 6.0;
  return spec;
}

}  // namespace

TEST_CASE("rubric category and semester names round trip") {
  CHECK(to_string(RubricCategory::DataInkRatio) == "data_ink_ratio");
  CHECK(parse_rubric_category("gestalt_principles") ==
        RubricCategory::GestaltPrinciples);
  CHECK(!parse_rubric_category("style").has_value());
  CHECK(rubric_category_names().find("lie_factor") != std::string::npos);
  CHECK(to_string(Semester::Spring) == "Spring");
  CHECK(parse_semester("Fall") == Semester::Fall);
  CHECK(!parse_semester("Summer").has_value());
}

TEST_CASE("validate accepts a clean corpus") {
  auto corpus = make_corpus({make_review("r1", "s1", "s2", 2020, "good chart"),
                             make_review("r2", "s2", "s1", 2021, "bad labels")},
                            {2020, 2021});
  corpus.reviews[0].rubric_scores = {{RubricCategory::ClearLabeling, 4}};
  corpus.reviews[0].comments[0].sentiment_score = 0.4;
  CHECK(validate(corpus).ok());
}

TEST_CASE("validate flags each violation kind") {
  SUBCASE("self review") {
    const auto corpus =
        make_corpus({make_review("r1", "s1", "s1", 2020, "text")}, {2020, 2020});
    const auto report = validate(corpus);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::SelfReview);
    CHECK(report.violations[0].record_position == 0);
    CHECK(report.violations[0].record_id == "r1");
  }
  SUBCASE("year out of span") {
    const auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2019, "text")}, {2020, 2021});
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::YearOutOfSpan});
  }
  SUBCASE("duplicate rubric category") {
    auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "text")}, {2020, 2020});
    corpus.reviews[0].rubric_scores = {{RubricCategory::LieFactor, 3},
                                       {RubricCategory::LieFactor, 4}};
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::DuplicateRubricCategory});
  }
  SUBCASE("score out of range") {
    auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "text")}, {2020, 2020});
    corpus.reviews[0].rubric_scores = {{RubricCategory::ChartJunk, 6}};
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::ScoreOutOfRange});
  }
  SUBCASE("empty comment text") {
    const auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "")}, {2020, 2020});
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::EmptyCommentText});
  }
  SUBCASE("sentiment out of range") {
    auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "text")}, {2020, 2020});
    corpus.reviews[0].comments[0].sentiment_score = 1.2;
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::SentimentOutOfRange});
  }
  SUBCASE("duplicate review id") {
    const auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "text"),
                     make_review("r1", "s3", "s4", 2020, "text")},
                    {2020, 2020});
    const auto report = validate(corpus);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::DuplicateReviewId);
    CHECK(report.violations[0].record_position == 1);
  }
  SUBCASE("comment review mismatch") {
    auto corpus =
        make_corpus({make_review("r1", "s1", "s2", 2020, "text")}, {2020, 2020});
    corpus.reviews[0].comments[0].review_id = "other";
    CHECK(kinds(validate(corpus)) ==
          std::vector<ViolationKind>{ViolationKind::CommentReviewMismatch});
  }
}

TEST_CASE("validate orders violations by record position") {
  auto corpus = make_corpus({make_review("r1", "s1", "s1", 2020, "text"),
                             make_review("r2", "s2", "s3", 1999, "")},
                            {2020, 2020});
  const auto report = validate(corpus);
  REQUIRE(report.violations.size() == 3);
  CHECK(report.violations[0].record_position == 0);
  CHECK(report.violations[0].kind == ViolationKind::SelfReview);
  CHECK(report.violations[1].record_position == 1);
  CHECK(report.violations[2].record_position == 1);
  for (const auto& v : report.violations) CHECK(!v.message.empty());
}

TEST_CASE("anonymize replaces ids deterministically") {
  const auto corpus = make_corpus({make_review("r1", "alice", "bob", 2020, "a"),
                                   make_review("r2", "bob", "alice", 2020, "b")},
                                  {2020, 2020});
  const Corpus a = anonymize(corpus, "salt-1");
  const Corpus b = anonymize(corpus, "salt-1");
  CHECK(a == b);

  // pseudonyms are 12 lowercase hex chars and consistent across records
  const std::string& alice1 = a.reviews[0].reviewer;
  CHECK(alice1.size() == 12);
  CHECK(alice1.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(a.reviews[1].reviewee == alice1);
  CHECK(a.reviews[0].reviewee == a.reviews[1].reviewer);
  CHECK(alice1 != a.reviews[0].reviewee);
  CHECK(alice1 != "alice");

  // a different salt relabels everyone
  const Corpus c = anonymize(corpus, "salt-2");
  CHECK(c.reviews[0].reviewer != alice1);

  // text and structure survive untouched
  CHECK(a.reviews[0].comments == corpus.reviews[0].comments);
  CHECK(a.year_span == corpus.year_span);

  CHECK_THROWS_AS(anonymize(corpus, ""), std::invalid_argument);
}

TEST_CASE("stats counts words with the shared tokenizer") {
  auto corpus = make_corpus({make_review("r1", "s1", "s2", 2020, "Good chart!"),
                             make_review("r2", "s2", "s3", 2021, "don't; stop")},
                            {2020, 2021});
  const CorpusStats s = stats(corpus);
  CHECK(s.total_reviews == 2);
  CHECK(s.total_comments == 2);
  CHECK(s.total_words == 4);  // good, chart, don't, stop
  REQUIRE(s.mean_words_per_review.has_value());
  CHECK(*s.mean_words_per_review == doctest::Approx(2.0));
  CHECK(s.words_by_year.at(2020) == 2);
  CHECK(s.comments_by_year.at(2021) == 1);

  const CorpusStats empty = stats(Corpus{});
  CHECK(empty.total_reviews == 0);
  CHECK(!empty.mean_words_per_review.has_value());
}

TEST_CASE("genspec check rejects inconsistent models") {
  CHECK_NOTHROW(check(tiny_spec()));

  auto no_classes = tiny_spec();
  no_classes.class_labels.clear();
  no_classes.class_priors.clear();
  no_classes.token_distributions.clear();
  CHECK_THROWS_AS(check(no_classes), ConfigError);

  auto bad_priors = tiny_spec();
  bad_priors.class_priors = {0.7, 0.7};
  CHECK_THROWS_AS(check(bad_priors), ConfigError);

  auto bad_rows = tiny_spec();
  bad_rows.token_distributions.pop_back();
  CHECK_THROWS_AS(check(bad_rows), ConfigError);

  auto bad_row_sum = tiny_spec();
  bad_row_sum.token_distributions[0] = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(check(bad_row_sum), ConfigError);

  auto both_counts = tiny_spec();
  both_counts.comments_per_class = {10, 10};
  CHECK_THROWS_AS(check(both_counts), ConfigError);

  auto neither_count = tiny_spec();
  neither_count.total_comments = 0;
  CHECK_THROWS_AS(check(neither_count), ConfigError);

  auto bad_token = tiny_spec();
  bad_token.vocabulary[0] = "two words";
  CHECK_THROWS_AS(check(bad_token), ConfigError);

  auto bad_length = tiny_spec();
  bad_length.mean_comment_length = 0.0;
  CHECK_THROWS_AS(check(bad_length), ConfigError);
}

TEST_CASE("synthesize is deterministic and respects counts") {
  const GenSpec spec = tiny_spec();
  const Corpus a = synthesize(spec, 42);
  const Corpus b = synthesize(spec, 42);
  CHECK(a == b);
  const Corpus c = synthesize(spec, 43);
  CHECK(a != c);

  std::size_t comments = 0;
  for (const auto& r : a.reviews) comments += r.comments.size();
  CHECK(comments == 60);

  // every comment carries its generating label and non-empty text
  for (const auto& r : a.reviews) {
    for (const auto& k : r.comments) {
      CHECK((k.label == "neg" || k.label == "pos"));
      CHECK(!k.text.empty());
    }
  }

  // generated corpora validate cleanly
  CHECK(validate(a).ok());
}

TEST_CASE("synthesize honors per-class counts and grouping") {
  GenSpec spec = tiny_spec();
  spec.total_comments = 0;
  spec.comments_per_class = {12, 30};
  spec.comments_per_review = 3;
  spec.year_weights = {{2019, 0.5}, {2021, 0.5}};
  const Corpus corpus = synthesize(spec, 7);

  std::size_t neg = 0;
  std::size_t pos = 0;
  std::set<int> years;
  for (const auto& r : corpus.reviews) {
    CHECK(r.comments.size() <= 3);
    years.insert(r.year);
    for (const auto& k : r.comments) {
      if (k.label == "neg") ++neg;
      if (k.label == "pos") ++pos;
      for (const auto& token : tokenize(k.text)) {
        CHECK(std::find(spec.vocabulary.begin(), spec.vocabulary.end(),
                        token) != spec.vocabulary.end());
      }
    }
  }
  CHECK(neg == 12);
  CHECK(pos == 30);
  for (int y : years) CHECK((y == 2019 || y == 2021));
  CHECK(corpus.year_span.first >= 2019);
  CHECK(corpus.year_span.second <= 2021);
}

TEST_CASE("genspec serialization round trips") {
  GenSpec spec = tiny_spec();
  spec.year_weights = {{2020, 0.25}, {2022, 0.75}};
  std::ostringstream out;
  save_genspec(spec, out);
  std::istringstream in(out.str());
  const GenSpec back = load_genspec(in);

  std::ostringstream again;
  save_genspec(back, again);
  CHECK(again.str() == out.str());
  CHECK(synthesize(back, 5) == synthesize(spec, 5));

  std::istringstream garbage("{not json");
  CHECK_THROWS_AS(load_genspec(garbage), ParseError);
}
