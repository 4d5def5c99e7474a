#include "revmine/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "revmine/csv.hpp"
#include "revmine/error.hpp"

namespace revmine {

namespace {

using nlohmann::json;

constexpr int kReportSchemaVersion = 1;

TrendSeries trend_from_map(const Corpus& corpus, std::string metric,
                           const std::map<int, std::size_t>& by_year) {
  TrendSeries series;
  series.metric = std::move(metric);
  if (corpus.reviews.empty()) return series;
  std::map<int, double> points;
  for (int year = corpus.year_span.first; year <= corpus.year_span.second;
       ++year) {
    points[year] = 0.0;
  }
  for (const auto& [year, value] : by_year) {
    points[year] = static_cast<double>(value);
  }
  series.points.assign(points.begin(), points.end());
  return series;
}

}  // namespace

TrendSeries yearly_word_counts(const Corpus& corpus) {
  return trend_from_map(corpus, "words", stats(corpus).words_by_year);
}

TrendSeries yearly_comment_counts(const Corpus& corpus) {
  return trend_from_map(corpus, "comments", stats(corpus).comments_by_year);
}

PosDistribution pos_distribution(const Corpus& corpus,
                                 const Lexicon& lexicon) {
  PosDistribution dist;
  for (const Review& review : corpus.reviews) {
    for (const Comment& comment : review.comments) {
      dist.totals += pos_profile(tag_pos(tokenize(comment.text), lexicon));
    }
  }
  if (dist.totals.token_total > 0) {
    std::array<double, kPosTagCount> proportions{};
    for (std::size_t i = 0; i < kPosTagCount; ++i) {
      proportions[i] = static_cast<double>(dist.totals.counts[i]) /
                       static_cast<double>(dist.totals.token_total);
    }
    dist.proportions = proportions;
  }
  return dist;
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson: series differ in length");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("pearson: need at least 2 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const NamedSeries> columns) {
  for (const NamedSeries& column : columns) {
    if (column.values.size() != columns.front().values.size()) {
      throw std::invalid_argument(
          "correlation_matrix: columns differ in length");
    }
  }
  CorrelationMatrix matrix;
  for (const NamedSeries& column : columns) {
    matrix.variable_names.push_back(column.name);
  }
  const std::size_t m = columns.size();
  matrix.values.assign(m * m, std::nullopt);
  std::vector<bool> constant(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& v = columns[i].values;
    constant[i] =
        std::all_of(v.begin(), v.end(),
                    [&](double value) { return value == v.front(); });
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!constant[i]) matrix.values[i * m + i] = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto r = pearson(columns[i].values, columns[j].values);
      matrix.values[i * m + j] = r;
      matrix.values[j * m + i] = r;
    }
  }
  return matrix;
}

CorrelationMatrix pos_correlation_matrix(const Corpus& corpus,
                                         const Lexicon& lexicon,
                                         bool include_length) {
  // Fig-style variable set: the four open POS classes per comment.
  static constexpr PosTag kVariables[] = {PosTag::Noun, PosTag::Verb,
                                          PosTag::Adjective, PosTag::Adverb};
  std::vector<NamedSeries> columns;
  for (const PosTag tag : kVariables) {
    columns.push_back({std::string(to_string(tag)), {}});
  }
  if (include_length) columns.push_back({"length", {}});
  for (const Review& review : corpus.reviews) {
    for (const Comment& comment : review.comments) {
      const PosProfile profile =
          pos_profile(tag_pos(tokenize(comment.text), lexicon));
      for (std::size_t v = 0; v < 4; ++v) {
        columns[v].values.push_back(
            static_cast<double>(profile.count(kVariables[v])));
      }
      if (include_length) {
        columns.back().values.push_back(
            static_cast<double>(profile.token_total));
      }
    }
  }
  if (columns.front().values.size() < 2) {
    throw std::invalid_argument(
        "pos_correlation_matrix: need at least 2 comments");
  }
  return correlation_matrix(columns);
}

RubricReport rubric_report(const Corpus& corpus, const PipelineConfig& config,
                           const FoldPlan& plan, const Lexicon& lexicon) {
  RubricReport report;
  std::vector<LabeledInstance> instances = extract_instances(
      corpus, Task::Rubric, lexicon, config.sentiment_epsilon,
      &report.warnings);
  if (plan.size() != instances.size()) {
    throw std::invalid_argument(
        "rubric_report: fold plan does not cover the rubric instances");
  }

  std::optional<double> best_score;
  for (std::size_t c = 0; c < kRubricCategoryCount; ++c) {
    const auto category = static_cast<RubricCategory>(c);
    const std::string name(to_string(category));
    std::size_t positives = 0;
    std::vector<LabeledInstance> relabeled = instances;
    for (LabeledInstance& instance : relabeled) {
      if (instance.label == name) {
        ++positives;
      } else {
        instance.label = "rest";
      }
    }
    if (positives == 0) {
      report.warnings.push_back("category '" + name +
                                "' has no instances; skipped");
      continue;
    }
    PipelineConfig one_vs_rest = config;
    one_vs_rest.task = Task::Rubric;
    one_vs_rest.positive_class = name;
    CrossValidationResult cv =
        cross_validate(relabeled, one_vs_rest, plan, lexicon);
    report.categories[c].score = cv.metrics.accuracy;
    report.categories[c].aggregate = std::move(cv.aggregate);
    for (std::string& warning : cv.warnings) {
      report.warnings.push_back(name + ": " + warning);
    }
    if (!best_score || cv.metrics.accuracy > *best_score) {
      best_score = cv.metrics.accuracy;
      report.best = category;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report emission

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Text: return "text";
  }
  return "json";
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "json") return ReportFormat::Json;
  if (n == "csv") return ReportFormat::Csv;
  if (n == "text" || n == "txt") return ReportFormat::Text;
  return std::nullopt;
}

ReportBundle build_report(const Corpus& corpus, const Lexicon& lexicon,
                          bool include_length_column) {
  ReportBundle bundle;
  bundle.corpus_stats = stats(corpus);
  bundle.words_by_year = yearly_word_counts(corpus);
  bundle.comments_by_year = yearly_comment_counts(corpus);
  bundle.pos = pos_distribution(corpus, lexicon);
  if (bundle.corpus_stats.total_comments >= 2) {
    bundle.correlations =
        pos_correlation_matrix(corpus, lexicon, include_length_column);
  } else {
    bundle.warnings.push_back(
        "fewer than 2 comments; correlation matrix skipped");
  }
  return bundle;
}

namespace {

json trend_to_json(const TrendSeries& series) {
  json points = json::array();
  for (const auto& [year, value] : series.points) {
    points.push_back({year, value});
  }
  return points;
}

json bundle_to_json(const ReportBundle& bundle) {
  json object;
  object["schema"] = "revmine-report";
  object["schema_version"] = kReportSchemaVersion;

  json corpus;
  corpus["total_reviews"] = bundle.corpus_stats.total_reviews;
  corpus["total_comments"] = bundle.corpus_stats.total_comments;
  corpus["total_words"] = bundle.corpus_stats.total_words;
  if (bundle.corpus_stats.mean_words_per_review) {
    corpus["mean_words_per_review"] =
        *bundle.corpus_stats.mean_words_per_review;
  }
  object["corpus"] = std::move(corpus);

  object["trends"] = {{"words", trend_to_json(bundle.words_by_year)},
                      {"comments", trend_to_json(bundle.comments_by_year)}};

  json pos;
  json counts;
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    counts[std::string(to_string(static_cast<PosTag>(i)))] =
        bundle.pos.totals.counts[i];
  }
  pos["counts"] = std::move(counts);
  pos["token_total"] = bundle.pos.totals.token_total;
  if (bundle.pos.proportions) {
    json proportions;
    for (std::size_t i = 0; i < kPosTagCount; ++i) {
      proportions[std::string(to_string(static_cast<PosTag>(i)))] =
          (*bundle.pos.proportions)[i];
    }
    pos["proportions"] = std::move(proportions);
  }
  object["pos"] = std::move(pos);

  const std::size_t m = bundle.correlations.variable_names.size();
  json correlations;
  correlations["variables"] = bundle.correlations.variable_names;
  json matrix = json::array();
  for (std::size_t i = 0; i < m; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m; ++j) {
      const auto value = bundle.correlations.at(i, j);
      row.push_back(value ? json(*value) : json(nullptr));
    }
    matrix.push_back(std::move(row));
  }
  correlations["matrix"] = std::move(matrix);
  object["correlations"] = std::move(correlations);

  object["reference"] = {
      {"pos_correlation_band",
       {kPosCorrelationReferenceBand.first,
        kPosCorrelationReferenceBand.second}}};

  if (bundle.rubric) {
    json rubric;
    json categories;
    for (std::size_t c = 0; c < kRubricCategoryCount; ++c) {
      const auto& entry = bundle.rubric->categories[c];
      const std::string name(to_string(static_cast<RubricCategory>(c)));
      categories[name] =
          entry.score ? json{{"score", *entry.score}} : json{{"score", nullptr}};
    }
    rubric["categories"] = std::move(categories);
    if (bundle.rubric->best) {
      rubric["best"] = std::string(to_string(*bundle.rubric->best));
    }
    object["rubric"] = std::move(rubric);
  }

  json warnings = json::array();
  for (const std::string& w : bundle.warnings) warnings.push_back(w);
  if (bundle.rubric) {
    for (const std::string& w : bundle.rubric->warnings) {
      warnings.push_back(w);
    }
  }
  object["warnings"] = std::move(warnings);
  return object;
}

void write_file(const std::filesystem::path& path,
                const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw ConfigError("failed writing " + path.string());
  }
}

std::string trend_to_csv(const TrendSeries& series) {
  std::ostringstream out;
  csv::write_row(out, std::vector<std::string>{"year", series.metric});
  for (const auto& [year, value] : series.points) {
    csv::write_row(out, std::vector<std::string>{std::to_string(year),
                                                 csv::format_double(value)});
  }
  return out.str();
}

std::string pos_to_csv(const PosDistribution& dist) {
  std::ostringstream out;
  csv::write_row(out,
                 std::vector<std::string>{"tag", "count", "proportion"});
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    csv::write_row(
        out, std::vector<std::string>{
                 std::string(to_string(static_cast<PosTag>(i))),
                 std::to_string(dist.totals.counts[i]),
                 dist.proportions
                     ? csv::format_double((*dist.proportions)[i])
                     : ""});
  }
  return out.str();
}

std::string correlations_to_csv(const CorrelationMatrix& matrix) {
  std::ostringstream out;
  const std::size_t m = matrix.variable_names.size();
  std::vector<std::string> row;
  row.push_back("variable");
  for (const std::string& name : matrix.variable_names) row.push_back(name);
  csv::write_row(out, row);
  for (std::size_t i = 0; i < m; ++i) {
    row.clear();
    row.push_back(matrix.variable_names[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const auto value = matrix.at(i, j);
      row.push_back(value ? csv::format_double(*value) : "");
    }
    csv::write_row(out, row);
  }
  return out.str();
}

std::string rubric_to_csv(const RubricReport& report) {
  std::ostringstream out;
  csv::write_row(out, std::vector<std::string>{"category", "score"});
  for (std::size_t c = 0; c < kRubricCategoryCount; ++c) {
    csv::write_row(
        out, std::vector<std::string>{
                 std::string(to_string(static_cast<RubricCategory>(c))),
                 report.categories[c].score
                     ? csv::format_double(*report.categories[c].score)
                     : ""});
  }
  return out.str();
}

std::string bundle_to_text(const ReportBundle& bundle) {
  std::ostringstream out;
  out << "corpus\n";
  out << "  reviews:  " << bundle.corpus_stats.total_reviews << "\n";
  out << "  comments: " << bundle.corpus_stats.total_comments << "\n";
  out << "  words:    " << bundle.corpus_stats.total_words << "\n";
  if (bundle.corpus_stats.mean_words_per_review) {
    out << "  words per review: "
        << csv::format_double(*bundle.corpus_stats.mean_words_per_review)
        << "\n";
  }
  out << "\nwords by year\n";
  for (const auto& [year, value] : bundle.words_by_year.points) {
    out << "  " << year << "  " << csv::format_double(value) << "\n";
  }
  out << "\npos distribution\n";
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    out << "  " << to_string(static_cast<PosTag>(i)) << "  "
        << bundle.pos.totals.counts[i];
    if (bundle.pos.proportions) {
      out << "  " << csv::format_double((*bundle.pos.proportions)[i]);
    }
    out << "\n";
  }
  const std::size_t m = bundle.correlations.variable_names.size();
  if (m > 0) {
    out << "\npos correlations (reference band "
        << csv::format_double(kPosCorrelationReferenceBand.first) << ".."
        << csv::format_double(kPosCorrelationReferenceBand.second) << ")\n";
    for (std::size_t i = 0; i < m; ++i) {
      out << "  " << bundle.correlations.variable_names[i];
      for (std::size_t j = 0; j < m; ++j) {
        const auto value = bundle.correlations.at(i, j);
        out << "  " << (value ? csv::format_double(*value) : "-");
      }
      out << "\n";
    }
  }
  if (bundle.rubric) {
    out << "\nrubric category scores\n";
    for (std::size_t c = 0; c < kRubricCategoryCount; ++c) {
      out << "  " << to_string(static_cast<RubricCategory>(c)) << "  "
          << (bundle.rubric->categories[c].score
                  ? csv::format_double(*bundle.rubric->categories[c].score)
                  : "unavailable")
          << "\n";
    }
    if (bundle.rubric->best) {
      out << "  best: " << to_string(*bundle.rubric->best) << "\n";
    }
  }
  const auto print_warnings = [&](const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) out << "  " << w << "\n";
  };
  if (!bundle.warnings.empty() ||
      (bundle.rubric && !bundle.rubric->warnings.empty())) {
    out << "\nwarnings\n";
    print_warnings(bundle.warnings);
    if (bundle.rubric) print_warnings(bundle.rubric->warnings);
  }
  return out.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const ReportBundle& bundle, ReportFormat format,
    const std::filesystem::path& destination) {
  std::error_code ec;
  std::filesystem::create_directories(destination, ec);
  if (ec) {
    throw ConfigError("cannot create " + destination.string() + ": " +
                      ec.message());
  }
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::filesystem::path& name,
                        const std::string& content) {
    const auto path = destination / name;
    write_file(path, content);
    written.push_back(path);
  };
  switch (format) {
    case ReportFormat::Json:
      emit("report.json", bundle_to_json(bundle).dump(2) + "\n");
      break;
    case ReportFormat::Csv:
      emit("trend_words.csv", trend_to_csv(bundle.words_by_year));
      emit("trend_comments.csv", trend_to_csv(bundle.comments_by_year));
      emit("pos_distribution.csv", pos_to_csv(bundle.pos));
      if (!bundle.correlations.variable_names.empty()) {
        emit("correlation.csv", correlations_to_csv(bundle.correlations));
      }
      if (bundle.rubric) {
        emit("rubric_scores.csv", rubric_to_csv(*bundle.rubric));
      }
      break;
    case ReportFormat::Text:
      emit("report.txt", bundle_to_text(bundle));
      break;
  }
  return written;
}

}  // namespace revmine
