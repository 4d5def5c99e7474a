#include "revmine/io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "revmine/csv.hpp"
#include "revmine/error.hpp"
#include "revmine/textproc.hpp"

namespace revmine {

namespace {

using nlohmann::json;

int parse_int_cell(std::string_view cell, std::size_t line,
                   const std::string& field) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("'" + std::string(cell) + "' is not an integer", line,
                     field);
  }
  return value;
}

double parse_double_cell(std::string_view cell, std::size_t line,
                         const std::string& field) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError("'" + std::string(cell) + "' is not a number", line,
                     field);
  }
  return value;
}

double checked_sentiment(double value, std::size_t line,
                         const std::string& field) {
  if (!(value >= -1.0 && value <= 1.0)) {
    throw ParseError("sentiment " + std::to_string(value) +
                         " outside [-1, 1]",
                     line, field);
  }
  return value;
}

RubricCategory checked_category(std::string_view name, std::size_t line,
                                const std::string& field) {
  const auto category = parse_rubric_category(name);
  if (!category) {
    throw ParseError("unknown rubric category '" + std::string(name) +
                         "'; valid categories: " + rubric_category_names(),
                     line, field);
  }
  return *category;
}

Semester checked_semester(std::string_view name, std::size_t line,
                          const std::string& field) {
  const auto semester = parse_semester(name);
  if (!semester) {
    throw ParseError("unknown semester '" + std::string(name) +
                         "'; expected Fall or Spring",
                     line, field);
  }
  return *semester;
}

void finish(Corpus& corpus, const IngestOptions& options) {
  if (options.year_span) {
    corpus.year_span = *options.year_span;
  } else if (corpus.reviews.empty()) {
    corpus.year_span = {0, 0};
  } else {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const Review& r : corpus.reviews) {
      lo = std::min(lo, r.year);
      hi = std::max(hi, r.year);
    }
    corpus.year_span = {lo, hi};
  }
  corpus.score_range = options.score_range;
  if (options.validate) {
    const ValidationReport report = validate(corpus);
    if (!report.ok()) {
      std::string message = report.violations.front().message;
      if (report.violations.size() > 1) {
        message += " (and " + std::to_string(report.violations.size() - 1) +
                   " more violations)";
      }
      throw DataError(message);
    }
  }
}

}  // namespace

std::string_view to_string(Format f) {
  return f == Format::Csv ? "csv" : "jsonl";
}

std::optional<Format> parse_format(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "csv") return Format::Csv;
  if (n == "jsonl") return Format::Jsonl;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV

Corpus ingest_csv(std::istream& in, const Schema& schema,
                  const IngestOptions& options) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  std::size_t line = 0;

  Corpus corpus;
  if (!reader.next(row, &line)) {
    finish(corpus, options);
    return corpus;
  }

  std::unordered_map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < row.size(); ++i) columns[row[i]] = i;
  const auto column = [&](const std::string& name,
                          bool required) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    if (it == columns.end()) {
      if (required) {
        throw ParseError("missing required column '" + name + "'", 1, name);
      }
      return std::nullopt;
    }
    return it->second;
  };

  const auto col_review_id = *column(schema.review_id, true);
  const auto col_reviewer = *column(schema.reviewer, true);
  const auto col_reviewee = *column(schema.reviewee, true);
  const auto col_year = *column(schema.year, true);
  const auto col_semester = *column(schema.semester, true);
  const auto col_text = *column(schema.text, true);
  const auto col_comment_id = column(schema.comment_id, false);
  const auto col_sentiment = column(schema.sentiment, false);
  const auto col_label = column(schema.label, false);
  const auto col_rubric_category = column(schema.rubric_category, false);
  const auto col_rubric_score = column(schema.rubric_score, false);
  if (col_rubric_category.has_value() != col_rubric_score.has_value()) {
    throw ParseError("columns '" + schema.rubric_category + "' and '" +
                         schema.rubric_score + "' must appear together",
                     1, schema.rubric_category);
  }
  const std::size_t expected_fields = columns.size();

  std::unordered_map<std::string, std::size_t> review_index;
  while (reader.next(row, &line)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != expected_fields) {
      throw ParseError("expected " + std::to_string(expected_fields) +
                           " fields, got " + std::to_string(row.size()),
                       line);
    }
    const auto cell = [&](std::size_t i) -> const std::string& {
      return row[i];
    };

    const std::string& review_id = cell(col_review_id);
    if (review_id.empty()) {
      throw ParseError("empty review id", line, schema.review_id);
    }
    const std::string& reviewer = cell(col_reviewer);
    const std::string& reviewee = cell(col_reviewee);
    const int year = parse_int_cell(cell(col_year), line, schema.year);
    const Semester semester =
        checked_semester(cell(col_semester), line, schema.semester);

    Review* review = nullptr;
    if (const auto it = review_index.find(review_id);
        it != review_index.end()) {
      review = &corpus.reviews[it->second];
      // rows of one review must agree on the review fields
      const auto conflict = [&](std::string_view field) {
        throw ParseError("review '" + review_id + "' redefines " +
                             std::string(field),
                         line, std::string(field));
      };
      if (review->reviewer != reviewer) conflict(schema.reviewer);
      if (review->reviewee != reviewee) conflict(schema.reviewee);
      if (review->year != year) conflict(schema.year);
      if (review->semester != semester) conflict(schema.semester);
    } else {
      review_index.emplace(review_id, corpus.reviews.size());
      corpus.reviews.push_back(
          {review_id, reviewer, reviewee, year, semester, {}, {}});
      review = &corpus.reviews.back();
    }

    if (col_rubric_category) {
      const std::string& category_cell = cell(*col_rubric_category);
      const std::string& score_cell = cell(*col_rubric_score);
      if (!category_cell.empty()) {
        const RubricCategory category =
            checked_category(category_cell, line, schema.rubric_category);
        const int score =
            parse_int_cell(score_cell, line, schema.rubric_score);
        review->rubric_scores.push_back({category, score});
      } else if (!score_cell.empty()) {
        throw ParseError("rubric score without a rubric category", line,
                         schema.rubric_score);
      }
    }

    const std::string& text = cell(col_text);
    std::string comment_id = col_comment_id ? cell(*col_comment_id) : "";
    if (!text.empty() || !comment_id.empty()) {
      if (comment_id.empty()) {
        comment_id =
            review_id + "#" + std::to_string(review->comments.size() + 1);
      }
      Comment comment{comment_id, review_id, text, std::nullopt, ""};
      if (col_sentiment && !cell(*col_sentiment).empty()) {
        comment.sentiment_score = checked_sentiment(
            parse_double_cell(cell(*col_sentiment), line, schema.sentiment),
            line, schema.sentiment);
      }
      if (col_label) comment.label = cell(*col_label);
      review->comments.push_back(std::move(comment));
    }
  }

  finish(corpus, options);
  return corpus;
}

void export_csv(const Corpus& corpus, std::ostream& out,
                const Schema& schema) {
  const std::vector<std::string> header{
      schema.review_id, schema.reviewer,  schema.reviewee,
      schema.year,      schema.semester,  schema.comment_id,
      schema.text,      schema.sentiment, schema.label,
      schema.rubric_category, schema.rubric_score};
  csv::write_row(out, header);
  std::vector<std::string> row(header.size());
  for (const Review& review : corpus.reviews) {
    const std::size_t rows =
        std::max<std::size_t>(1, std::max(review.comments.size(),
                                          review.rubric_scores.size()));
    for (std::size_t i = 0; i < rows; ++i) {
      row[0] = review.id;
      row[1] = review.reviewer;
      row[2] = review.reviewee;
      row[3] = std::to_string(review.year);
      row[4] = std::string(to_string(review.semester));
      if (i < review.comments.size()) {
        const Comment& c = review.comments[i];
        row[5] = c.id;
        row[6] = c.text;
        row[7] = c.sentiment_score ? csv::format_double(*c.sentiment_score) : "";
        row[8] = c.label;
      } else {
        row[5].clear();
        row[6].clear();
        row[7].clear();
        row[8].clear();
      }
      if (i < review.rubric_scores.size()) {
        const RubricScore& rs = review.rubric_scores[i];
        row[9] = std::string(to_string(rs.category));
        row[10] = std::to_string(rs.score);
      } else {
        row[9].clear();
        row[10].clear();
      }
      csv::write_row(out, row);
    }
  }
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

const json& require_key(const json& object, const std::string& key,
                        std::size_t line) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError("missing field '" + key + "'", line, key);
  }
  return *it;
}

std::string string_field(const json& object, const std::string& key,
                         std::size_t line) {
  const json& value = require_key(object, key, line);
  if (!value.is_string()) {
    throw ParseError("field '" + key + "' must be a string", line, key);
  }
  return value.get<std::string>();
}

}  // namespace

Corpus ingest_jsonl(std::istream& in, const Schema& schema,
                    const IngestOptions& options) {
  Corpus corpus;
  std::string line_text;
  std::size_t line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text.find_first_not_of(" \t") == std::string::npos) continue;

    json object;
    try {
      object = json::parse(line_text);
    } catch (const json::parse_error& e) {
      throw ParseError("invalid JSON: " + std::string(e.what()), line);
    }
    if (!object.is_object()) {
      throw ParseError("expected a JSON object", line);
    }

    Review review;
    review.id = string_field(object, schema.review_id, line);
    review.reviewer = string_field(object, schema.reviewer, line);
    review.reviewee = string_field(object, schema.reviewee, line);
    const json& year = require_key(object, schema.year, line);
    if (!year.is_number_integer()) {
      throw ParseError("field '" + schema.year + "' must be an integer",
                       line, schema.year);
    }
    review.year = year.get<int>();
    review.semester = checked_semester(
        string_field(object, schema.semester, line), line, schema.semester);

    if (const auto it = object.find("rubric_scores"); it != object.end()) {
      if (!it->is_array()) {
        throw ParseError("field 'rubric_scores' must be an array", line,
                         "rubric_scores");
      }
      for (const json& entry : *it) {
        if (!entry.is_object()) {
          throw ParseError("rubric_scores entries must be objects", line,
                           "rubric_scores");
        }
        const RubricCategory category = checked_category(
            string_field(entry, "category", line), line, "category");
        const json& score = require_key(entry, "score", line);
        if (!score.is_number_integer()) {
          throw ParseError("rubric 'score' must be an integer", line,
                           "score");
        }
        review.rubric_scores.push_back({category, score.get<int>()});
      }
    }

    if (const auto it = object.find("comments"); it != object.end()) {
      if (!it->is_array()) {
        throw ParseError("field 'comments' must be an array", line,
                         "comments");
      }
      for (const json& entry : *it) {
        if (!entry.is_object()) {
          throw ParseError("comments entries must be objects", line,
                           "comments");
        }
        Comment comment;
        comment.review_id = review.id;
        if (entry.contains("id")) {
          comment.id = string_field(entry, "id", line);
        } else {
          comment.id =
              review.id + "#" + std::to_string(review.comments.size() + 1);
        }
        comment.text = string_field(entry, "text", line);
        if (const auto s = entry.find("sentiment"); s != entry.end()) {
          if (!s->is_number()) {
            throw ParseError("comment 'sentiment' must be a number", line,
                             "sentiment");
          }
          comment.sentiment_score =
              checked_sentiment(s->get<double>(), line, "sentiment");
        }
        if (const auto l = entry.find("label"); l != entry.end()) {
          if (!l->is_string()) {
            throw ParseError("comment 'label' must be a string", line,
                             "label");
          }
          comment.label = l->get<std::string>();
        }
        review.comments.push_back(std::move(comment));
      }
    }

    corpus.reviews.push_back(std::move(review));
  }

  finish(corpus, options);
  return corpus;
}

void export_jsonl(const Corpus& corpus, std::ostream& out,
                  const Schema& schema) {
  for (const Review& review : corpus.reviews) {
    json object;
    object[schema.review_id] = review.id;
    object[schema.reviewer] = review.reviewer;
    object[schema.reviewee] = review.reviewee;
    object[schema.year] = review.year;
    object[schema.semester] = std::string(to_string(review.semester));
    if (!review.rubric_scores.empty()) {
      json scores = json::array();
      for (const RubricScore& rs : review.rubric_scores) {
        scores.push_back(
            {{"category", std::string(to_string(rs.category))},
             {"score", rs.score}});
      }
      object["rubric_scores"] = std::move(scores);
    }
    if (!review.comments.empty()) {
      json comments = json::array();
      for (const Comment& c : review.comments) {
        json comment{{"id", c.id}, {"text", c.text}};
        if (c.sentiment_score) comment["sentiment"] = *c.sentiment_score;
        if (!c.label.empty()) comment["label"] = c.label;
        comments.push_back(std::move(comment));
      }
      object["comments"] = std::move(comments);
    }
    out << object.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------

Corpus ingest(std::istream& in, Format format, const Schema& schema,
              const IngestOptions& options) {
  return format == Format::Csv ? ingest_csv(in, schema, options)
                               : ingest_jsonl(in, schema, options);
}

void export_corpus(const Corpus& corpus, std::ostream& out, Format format,
                   const Schema& schema) {
  if (format == Format::Csv) {
    export_csv(corpus, out, schema);
  } else {
    export_jsonl(corpus, out, schema);
  }
}

}  // namespace revmine
