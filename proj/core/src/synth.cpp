#include "revmine/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "revmine/error.hpp"
#include "revmine/rng.hpp"
#include "revmine/textproc.hpp"

namespace revmine {

namespace {

using nlohmann::json;

constexpr double kSumTolerance = 1e-9;

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> out(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    out[i] = running;
  }
  return out;
}

std::string padded_id(char prefix, std::size_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%c%06zu", prefix, n);
  return buf;
}

}  // namespace

void check(const GenSpec& spec) {
  if (spec.class_labels.empty()) {
    throw ConfigError("genspec: class_labels must be non-empty");
  }
  if (std::set<std::string>(spec.class_labels.begin(),
                            spec.class_labels.end())
          .size() != spec.class_labels.size()) {
    throw ConfigError("genspec: class_labels must be unique");
  }
  if (spec.class_priors.size() != spec.class_labels.size()) {
    throw ConfigError("genspec: class_priors must match class_labels");
  }
  double prior_sum = 0.0;
  for (const double p : spec.class_priors) {
    if (!(p >= 0.0)) throw ConfigError("genspec: negative class prior");
    prior_sum += p;
  }
  if (std::abs(prior_sum - 1.0) > kSumTolerance) {
    throw ConfigError("genspec: class_priors must sum to 1");
  }
  if (spec.vocabulary.empty()) {
    throw ConfigError("genspec: vocabulary must be non-empty");
  }
  for (const std::string& token : spec.vocabulary) {
    const auto pieces = tokenize(token);
    if (pieces.size() != 1 || pieces[0] != token) {
      throw ConfigError("genspec: vocabulary entry '" + token +
                        "' is not a single lowercase token");
    }
  }
  if (std::set<std::string>(spec.vocabulary.begin(), spec.vocabulary.end())
          .size() != spec.vocabulary.size()) {
    throw ConfigError("genspec: vocabulary tokens must be unique");
  }
  if (spec.token_distributions.size() != spec.class_labels.size()) {
    throw ConfigError(
        "genspec: token_distributions must have one row per class");
  }
  for (std::size_t k = 0; k < spec.token_distributions.size(); ++k) {
    const auto& row = spec.token_distributions[k];
    if (row.size() != spec.vocabulary.size()) {
      throw ConfigError("genspec: token distribution for class '" +
                        spec.class_labels[k] +
                        "' must cover the whole vocabulary");
    }
    double sum = 0.0;
    for (const double p : row) {
      if (!(p >= 0.0)) {
        throw ConfigError("genspec: negative token probability for class '" +
                          spec.class_labels[k] + "'");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw ConfigError("genspec: token distribution for class '" +
                        spec.class_labels[k] + "' must sum to 1");
    }
  }
  const bool per_class = !spec.comments_per_class.empty();
  const bool total = spec.total_comments > 0;
  if (per_class == total) {
    throw ConfigError(
        "genspec: exactly one of comments_per_class or total_comments");
  }
  if (per_class) {
    if (spec.comments_per_class.size() != spec.class_labels.size()) {
      throw ConfigError(
          "genspec: comments_per_class must match class_labels");
    }
    const std::size_t sum = std::accumulate(spec.comments_per_class.begin(),
                                            spec.comments_per_class.end(),
                                            std::size_t{0});
    if (sum == 0) throw ConfigError("genspec: zero comments requested");
  }
  if (!(spec.mean_comment_length > 0.0)) {
    throw ConfigError("genspec: mean_comment_length must be positive");
  }
  if (spec.comments_per_review == 0) {
    throw ConfigError("genspec: comments_per_review must be at least 1");
  }
  double year_sum = 0.0;
  for (const auto& [year, weight] : spec.year_weights) {
    if (!(weight >= 0.0)) {
      throw ConfigError("genspec: negative weight for year " +
                        std::to_string(year));
    }
    year_sum += weight;
  }
  if (!spec.year_weights.empty() && !(year_sum > 0.0)) {
    throw ConfigError("genspec: year_weights must carry positive mass");
  }
  if (spec.score_range.first > spec.score_range.second) {
    throw ConfigError("genspec: empty score_range");
  }
}

GenSpec load_genspec(std::istream& in) {
  json object;
  try {
    object = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("genspec: invalid JSON: " + std::string(e.what()));
  }
  if (!object.is_object()) {
    throw ConfigError("genspec: expected a JSON object");
  }

  GenSpec spec;
  try {
    spec.class_labels =
        object.at("class_labels").get<std::vector<std::string>>();
    spec.class_priors =
        object.at("class_priors").get<std::vector<double>>();
    spec.vocabulary = object.at("vocabulary").get<std::vector<std::string>>();
    spec.token_distributions = object.at("token_distributions")
                                   .get<std::vector<std::vector<double>>>();
    if (object.contains("comments_per_class")) {
      spec.comments_per_class =
          object["comments_per_class"].get<std::vector<std::size_t>>();
    }
    if (object.contains("total_comments")) {
      spec.total_comments = object["total_comments"].get<std::size_t>();
    }
    if (object.contains("mean_comment_length")) {
      spec.mean_comment_length = object["mean_comment_length"].get<double>();
    }
    if (object.contains("comments_per_review")) {
      spec.comments_per_review =
          object["comments_per_review"].get<std::size_t>();
    }
    if (object.contains("year_weights")) {
      for (const auto& [key, value] : object["year_weights"].items()) {
        int year = 0;
        const auto [ptr, ec] =
            std::from_chars(key.data(), key.data() + key.size(), year);
        if (ec != std::errc{} || ptr != key.data() + key.size()) {
          throw ConfigError("genspec: year_weights key '" + key +
                            "' is not a year");
        }
        spec.year_weights[year] = value.get<double>();
      }
    }
    if (object.contains("score_range")) {
      const auto range = object["score_range"].get<std::vector<int>>();
      if (range.size() != 2) {
        throw ConfigError("genspec: score_range must be [min, max]");
      }
      spec.score_range = {range[0], range[1]};
    }
  } catch (const json::exception& e) {
    throw ConfigError("genspec: " + std::string(e.what()));
  }

  check(spec);
  return spec;
}

void save_genspec(const GenSpec& spec, std::ostream& out) {
  json object;
  object["class_labels"] = spec.class_labels;
  object["class_priors"] = spec.class_priors;
  object["vocabulary"] = spec.vocabulary;
  object["token_distributions"] = spec.token_distributions;
  if (!spec.comments_per_class.empty()) {
    object["comments_per_class"] = spec.comments_per_class;
  } else {
    object["total_comments"] = spec.total_comments;
  }
  object["mean_comment_length"] = spec.mean_comment_length;
  object["comments_per_review"] = spec.comments_per_review;
  if (!spec.year_weights.empty()) {
    json weights;
    for (const auto& [year, weight] : spec.year_weights) {
      weights[std::to_string(year)] = weight;
    }
    object["year_weights"] = std::move(weights);
  }
  object["score_range"] = {spec.score_range.first, spec.score_range.second};
  out << object.dump(2) << '\n';
}

Corpus synthesize(const GenSpec& spec, std::uint64_t seed) {
  check(spec);

  auto gen = rng::engine(seed);

  // class assignment per comment, in generation order
  std::vector<std::size_t> labels;
  if (!spec.comments_per_class.empty()) {
    for (std::size_t k = 0; k < spec.comments_per_class.size(); ++k) {
      labels.insert(labels.end(), spec.comments_per_class[k], k);
    }
  } else {
    const std::vector<double> prior_cdf = cumulative(spec.class_priors);
    labels.reserve(spec.total_comments);
    for (std::size_t i = 0; i < spec.total_comments; ++i) {
      labels.push_back(rng::categorical(prior_cdf, gen));
    }
  }

  std::vector<std::vector<double>> token_cdfs;
  token_cdfs.reserve(spec.token_distributions.size());
  for (const auto& row : spec.token_distributions) {
    token_cdfs.push_back(cumulative(row));
  }

  std::vector<int> years;
  std::vector<double> year_cdf;
  if (spec.year_weights.empty()) {
    years = {2022};
    year_cdf = {1.0};
  } else {
    std::vector<double> weights;
    for (const auto& [year, weight] : spec.year_weights) {
      years.push_back(year);
      weights.push_back(weight);
    }
    year_cdf = cumulative(weights);
  }

  const std::size_t n_comments = labels.size();
  const std::size_t n_reviews =
      (n_comments + spec.comments_per_review - 1) / spec.comments_per_review;
  const std::uint64_t participant_pool =
      std::max<std::uint64_t>(4, n_reviews);

  Corpus corpus;
  corpus.reviews.reserve(n_reviews);
  corpus.year_span = {years.front(), years.back()};
  corpus.score_range = spec.score_range;

  std::size_t next_comment = 0;
  for (std::size_t r = 0; r < n_reviews; ++r) {
    Review review;
    review.id = padded_id('r', r + 1);
    review.year = years[rng::categorical(year_cdf, gen)];
    review.semester = rng::uniform_below(gen, 2) == 0 ? Semester::Fall
                                                      : Semester::Spring;
    const std::uint64_t reviewer = rng::uniform_below(gen, participant_pool);
    std::uint64_t reviewee = reviewer;
    while (reviewee == reviewer) {
      reviewee = rng::uniform_below(gen, participant_pool);
    }
    review.reviewer = padded_id('s', reviewer + 1);
    review.reviewee = padded_id('s', reviewee + 1);

    for (std::size_t slot = 0;
         slot < spec.comments_per_review && next_comment < n_comments;
         ++slot, ++next_comment) {
      const std::size_t k = labels[next_comment];
      const std::size_t length =
          std::max<std::size_t>(1, rng::poisson(spec.mean_comment_length, gen));
      std::string text;
      for (std::size_t t = 0; t < length; ++t) {
        if (t) text.push_back(' ');
        text += spec.vocabulary[rng::categorical(token_cdfs[k], gen)];
      }
      Comment comment;
      comment.id = review.id + "#" + std::to_string(slot + 1);
      comment.review_id = review.id;
      comment.text = std::move(text);
      comment.label = spec.class_labels[k];
      if (const auto sc = parse_sentiment_class(comment.label)) {
        switch (*sc) {
          case SentimentClass::Negative: comment.sentiment_score = -0.8; break;
          case SentimentClass::Neutral: comment.sentiment_score = 0.0; break;
          case SentimentClass::Positive: comment.sentiment_score = 0.8; break;
        }
      }
      review.comments.push_back(std::move(comment));
    }

    if (!review.comments.empty()) {
      if (const auto category =
              parse_rubric_category(review.comments.front().label)) {
        review.rubric_scores.push_back({*category, spec.score_range.second});
      }
    }

    corpus.reviews.push_back(std::move(review));
  }

  return corpus;
}

}  // namespace revmine
