#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "revmine/analytics.hpp"
#include "revmine/error.hpp"
#include "revmine/synth.hpp"
#include "testutil.hpp"

using namespace revmine;
using testutil::make_corpus;
using testutil::make_review;
using testutil::read_file;
using testutil::TempDir;

namespace {

Corpus labeled_corpus() {
  GenSpec spec;
  spec.class_labels = {"chart_junk", "clear_labeling"};
  spec.class_priors = {0.5, 0.5};
  spec.vocabulary = {"busy", "cluttered", "clear", "labeled"};
  spec.token_distributions = {{0.45, 0.45, 0.05, 0.05},
                              {0.05, 0.05, 0.45, 0.45}};
  spec.total_comments = 80;
  spec.mean_comment_length = 7.0;
  return synthesize(spec, 311);
}

}  // namespace

TEST_CASE("pearson matches hand-computed values") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> up = {2, 4, 6};
  const std::vector<double> down = {6, 4, 2};
  CHECK(*pearson(x, up) == 1.0);
  CHECK(*pearson(x, down) == -1.0);

  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {1, 3, 2, 4};
  CHECK(*pearson(a, b) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("pearson is symmetric and affine-invariant") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> value(-10, 10);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(12);
    std::vector<double> y(12);
    for (int i = 0; i < 12; ++i) {
      x[i] = value(gen);
      y[i] = value(gen);
    }
    const auto r = pearson(x, y);
    REQUIRE(r.has_value());
    CHECK(*pearson(y, x) == *r);
    CHECK(*r >= -1.0);
    CHECK(*r <= 1.0);

    const double a = scale(gen);
    const double b = value(gen);
    std::vector<double> ax(12);
    for (int i = 0; i < 12; ++i) ax[i] = a * x[i] + b;
    CHECK(*pearson(ax, y) == doctest::Approx(*r).epsilon(1e-9));
  }
}

TEST_CASE("pearson rejects degenerate input") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> constant = {5, 5, 5};
  CHECK(!pearson(x, constant).has_value());
  CHECK(!pearson(constant, x).has_value());

  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(pearson(x, two), std::invalid_argument);
  const std::vector<double> one = {1};
  CHECK_THROWS_AS(pearson(one, one), std::invalid_argument);
}

TEST_CASE("correlation_matrix is symmetric with a unit diagonal") {
  const std::vector<NamedSeries> columns = {
      {"a", {1, 2, 3, 4}},
      {"b", {2, 1, 4, 3}},
      {"flat", {7, 7, 7, 7}},
  };
  const CorrelationMatrix m = correlation_matrix(columns);
  REQUIRE(m.variable_names ==
          std::vector<std::string>{"a", "b", "flat"});
  CHECK(*m.at(0, 0) == 1.0);
  CHECK(*m.at(1, 1) == 1.0);
  // the constant column has no correlation with anything, itself included
  CHECK(!m.at(2, 2).has_value());
  CHECK(!m.at(0, 2).has_value());
  CHECK(*m.at(0, 1) == *m.at(1, 0));

  const std::vector<NamedSeries> ragged = {{"a", {1, 2}}, {"b", {1, 2, 3}}};
  CHECK_THROWS_AS(correlation_matrix(ragged), std::invalid_argument);
}

TEST_CASE("yearly trends zero-fill the corpus span") {
  auto corpus = make_corpus({make_review("r1", "a", "b", 2019, "good chart"),
                             make_review("r2", "b", "c", 2021, "bad")},
                            {2019, 2021});
  const TrendSeries words = yearly_word_counts(corpus);
  CHECK(words.metric == "words");
  REQUIRE(words.points.size() == 3);
  CHECK(words.points[0] == std::pair<int, double>{2019, 2.0});
  CHECK(words.points[1] == std::pair<int, double>{2020, 0.0});
  CHECK(words.points[2] == std::pair<int, double>{2021, 1.0});

  const TrendSeries comments = yearly_comment_counts(corpus);
  CHECK(comments.metric == "comments");
  CHECK(comments.points[1].second == 0.0);

  CHECK(yearly_word_counts(Corpus{}).points.empty());
}

TEST_CASE("pos_distribution aggregates tags over the corpus") {
  const auto corpus =
      make_corpus({make_review("r1", "a", "b", 2020, "the chart shows data")},
                  {2020, 2020});
  const PosDistribution dist = pos_distribution(corpus, bundled_lexicon());
  CHECK(dist.totals.token_total == 4);
  REQUIRE(dist.proportions.has_value());
  double sum = 0;
  for (double p : *dist.proportions) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  const PosDistribution empty = pos_distribution(Corpus{}, bundled_lexicon());
  CHECK(!empty.proportions.has_value());
}

TEST_CASE("pos_correlation_matrix correlates per-comment tag counts") {
  const Corpus corpus = labeled_corpus();
  const CorrelationMatrix m =
      pos_correlation_matrix(corpus, bundled_lexicon());
  CHECK(m.variable_names ==
        std::vector<std::string>{"noun", "verb", "adjective", "adverb"});
  const CorrelationMatrix with_length =
      pos_correlation_matrix(corpus, bundled_lexicon(), true);
  REQUIRE(with_length.variable_names.size() == 5);
  CHECK(with_length.variable_names.back() == "length");
  // symmetric everywhere there is variance
  const std::size_t n = with_length.variable_names.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(with_length.at(i, j) == with_length.at(j, i));

  const auto tiny =
      make_corpus({make_review("r1", "a", "b", 2020, "hi")}, {2020, 2020});
  CHECK_THROWS_AS(pos_correlation_matrix(tiny, bundled_lexicon()),
                  std::invalid_argument);
}

TEST_CASE("rubric_report scores present categories and skips missing ones") {
  const Corpus corpus = labeled_corpus();
  const auto instances =
      extract_instances(corpus, Task::Rubric, bundled_lexicon());
  const FoldPlan plan = kfold_plan(instances.size(), 4, 21, false);
  const RubricReport report =
      rubric_report(corpus, PipelineConfig{}, plan, bundled_lexicon());

  const auto& labeling =
      report.categories[static_cast<std::size_t>(RubricCategory::ClearLabeling)];
  const auto& junk =
      report.categories[static_cast<std::size_t>(RubricCategory::ChartJunk)];
  REQUIRE(labeling.score.has_value());
  REQUIRE(junk.score.has_value());
  CHECK(*labeling.score > 0.8);
  CHECK(*junk.score > 0.8);
  REQUIRE(labeling.aggregate.has_value());
  CHECK(labeling.aggregate->total() == instances.size());

  // absent categories carry no score and are mentioned in warnings
  const auto& lie =
      report.categories[static_cast<std::size_t>(RubricCategory::LieFactor)];
  CHECK(!lie.score.has_value());
  bool warned = false;
  for (const auto& w : report.warnings)
    if (w.find("lie_factor") != std::string::npos) warned = true;
  CHECK(warned);

  REQUIRE(report.best.has_value());
  CHECK((report.best == RubricCategory::ClearLabeling ||
         report.best == RubricCategory::ChartJunk));

  const FoldPlan wrong = kfold_plan(10, 2, 0, false);
  CHECK_THROWS_AS(
      rubric_report(corpus, PipelineConfig{}, wrong, bundled_lexicon()),
      std::invalid_argument);
}

TEST_CASE("report formats parse and print") {
  CHECK(to_string(ReportFormat::Csv) == "csv");
  CHECK(parse_report_format("text") == ReportFormat::Text);
  CHECK(parse_report_format("txt") == ReportFormat::Text);
  CHECK(parse_report_format("json") == ReportFormat::Json);
  CHECK(!parse_report_format("pdf").has_value());
}

TEST_CASE("build_report assembles every section") {
  const Corpus corpus = labeled_corpus();
  const ReportBundle bundle = build_report(corpus, bundled_lexicon(), true);
  CHECK(bundle.corpus_stats.total_comments == 80);
  CHECK(!bundle.words_by_year.points.empty());
  CHECK(bundle.pos.proportions.has_value());
  CHECK(bundle.correlations.variable_names.size() == 5);
  CHECK(!bundle.rubric.has_value());  // rubric scoring is attached separately

  // a single-comment corpus skips the correlation matrix with a warning
  const auto tiny =
      make_corpus({make_review("r1", "a", "b", 2020, "hi")}, {2020, 2020});
  const ReportBundle small = build_report(tiny, bundled_lexicon());
  CHECK(small.correlations.variable_names.empty());
  CHECK(!small.warnings.empty());
}

TEST_CASE("emit_report writes each format deterministically") {
  const Corpus corpus = labeled_corpus();
  ReportBundle bundle = build_report(corpus, bundled_lexicon());
  const auto instances =
      extract_instances(corpus, Task::Rubric, bundled_lexicon());
  const FoldPlan plan = kfold_plan(instances.size(), 4, 21, false);
  bundle.rubric =
      rubric_report(corpus, PipelineConfig{}, plan, bundled_lexicon());

  SUBCASE("json") {
    TempDir dir;
    const auto paths = emit_report(bundle, ReportFormat::Json, dir.path());
    REQUIRE(paths.size() == 1);
    const std::string text = read_file(paths[0]);
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc.at("schema") == "revmine-report");
    CHECK(doc.at("corpus").at("comments") == 80);
    CHECK(doc.at("pos").at("counts").contains("noun"));
    CHECK(doc.at("rubric").contains("best"));
    CHECK(doc.at("reference").at("pos_correlation_band")[0] == 0.82);

    TempDir dir2;
    const auto paths2 = emit_report(bundle, ReportFormat::Json, dir2.path());
    CHECK(read_file(paths2[0]) == text);
  }

  SUBCASE("csv") {
    TempDir dir;
    const auto paths = emit_report(bundle, ReportFormat::Csv, dir.path());
    std::vector<std::string> names;
    for (const auto& p : paths) names.push_back(p.filename().string());
    std::sort(names.begin(), names.end());
    CHECK(std::find(names.begin(), names.end(), "trend_words.csv") !=
          names.end());
    CHECK(std::find(names.begin(), names.end(), "pos_distribution.csv") !=
          names.end());
    CHECK(std::find(names.begin(), names.end(), "rubric_scores.csv") !=
          names.end());
    for (const auto& p : paths) CHECK(!read_file(p).empty());
  }

  SUBCASE("text") {
    TempDir dir;
    const auto paths = emit_report(bundle, ReportFormat::Text, dir.path());
    REQUIRE(paths.size() == 1);
    const std::string text = read_file(paths[0]);
    CHECK(text.find("comments") != std::string::npos);
    CHECK(text.find("0.82") != std::string::npos);
  }

  SUBCASE("destination that cannot be created") {
    TempDir dir;
    testutil::write_file(dir.file("blocker"), "x");
    CHECK_THROWS_AS(emit_report(bundle, ReportFormat::Json,
                                dir.file("blocker") / "sub"),
                    ConfigError);
  }
}
