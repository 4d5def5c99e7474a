#include "revmine/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "revmine/csv.hpp"
#include "revmine/error.hpp"
#include "revmine/rng.hpp"

namespace revmine {

namespace {

std::string format_fraction(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

// class label -> indices, in sorted label order
std::map<std::string, std::vector<std::size_t>> group_by_label(
    std::span<const std::string> labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[labels[i]].push_back(i);
  }
  return groups;
}

}  // namespace

// ---------------------------------------------------------------------------
// Holdout

SplitResult holdout_split(std::size_t n, const SplitSpec& spec,
                          std::span<const std::string> labels) {
  if (n < 2) {
    throw std::invalid_argument("holdout_split: need at least 2 records");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument(
        "holdout_split: train_fraction must lie in (0, 1)");
  }
  if (spec.stratified && labels.size() != n) {
    throw std::invalid_argument(
        "holdout_split: stratified mode needs one label per record");
  }

  SplitResult result;
  if (spec.train_fraction < 0.7 || spec.train_fraction > 0.8) {
    result.warnings.push_back(
        "train fraction " + format_fraction(spec.train_fraction) +
        " is outside the conventional 0.7-0.8 range");
  }

  std::size_t target = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  // both sides stay non-empty
  if (target == 0) {
    target = 1;
    result.warnings.push_back("train share rounded to zero; keeping 1 record");
  } else if (target == n) {
    target = n - 1;
    result.warnings.push_back(
        "train share rounded to the whole set; holding 1 record out");
  }

  auto gen = rng::engine(spec.seed);

  if (!spec.stratified) {
    const std::vector<std::size_t> perm = rng::index_permutation(n, gen);
    result.train.assign(perm.begin(),
                        perm.begin() + static_cast<std::ptrdiff_t>(target));
    result.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(target),
                       perm.end());
  } else {
    auto groups = group_by_label(labels);

    std::size_t singleton_total = 0;
    for (const auto& [label, indices] : groups) {
      if (indices.size() == 1) {
        ++singleton_total;
        result.warnings.push_back("class '" + label +
                                  "' has a single record; kept in train");
      }
    }
    const std::size_t remaining_target =
        target > singleton_total ? target - singleton_total : 0;
    std::size_t remaining_n = n - singleton_total;

    // largest-remainder allocation of the train share across classes
    struct Alloc {
      const std::string* label;
      std::vector<std::size_t>* indices;
      std::size_t take;
      std::size_t remainder;
    };
    std::vector<Alloc> allocs;
    std::size_t base_sum = 0;
    for (auto& [label, indices] : groups) {
      if (indices.size() == 1) continue;
      const std::size_t num = remaining_target * indices.size();
      Alloc a{&label, &indices, num / remaining_n, num % remaining_n};
      base_sum += a.take;
      allocs.push_back(a);
    }
    std::size_t extras = remaining_target - base_sum;
    std::vector<Alloc*> by_remainder;
    for (Alloc& a : allocs) by_remainder.push_back(&a);
    std::sort(by_remainder.begin(), by_remainder.end(),
              [](const Alloc* a, const Alloc* b) {
                if (a->remainder != b->remainder) {
                  return a->remainder > b->remainder;
                }
                return *a->label < *b->label;
              });
    for (Alloc* a : by_remainder) {
      if (extras == 0) break;
      if (a->take < a->indices->size()) {
        ++a->take;
        --extras;
      }
    }

    for (auto& [label, indices] : groups) {
      if (indices.size() == 1) {
        result.train.push_back(indices.front());
        continue;
      }
      rng::shuffle(indices, gen);
      const auto it = std::find_if(
          allocs.begin(), allocs.end(),
          [&](const Alloc& a) { return *a.label == label; });
      const std::size_t take = it->take;
      for (std::size_t j = 0; j < indices.size(); ++j) {
        (j < take ? result.train : result.test).push_back(indices[j]);
      }
    }
  }

  std::sort(result.train.begin(), result.train.end());
  std::sort(result.test.begin(), result.test.end());
  return result;
}

// ---------------------------------------------------------------------------
// K-fold

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const std::size_t fold : assignments) ++sizes[fold];
  return sizes;
}

FoldPlan kfold_plan(std::size_t n, std::size_t k, std::uint64_t seed,
                    bool stratified, std::span<const std::string> labels) {
  if (k < 2 || k > n) {
    throw std::invalid_argument("kfold_plan: k must satisfy 2 <= k <= n");
  }
  if (stratified && labels.size() != n) {
    throw std::invalid_argument(
        "kfold_plan: stratified mode needs one label per record");
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignments.assign(n, 0);

  auto gen = rng::engine(seed);
  if (!stratified) {
    const std::vector<std::size_t> perm = rng::index_permutation(n, gen);
    for (std::size_t pos = 0; pos < n; ++pos) {
      plan.assignments[perm[pos]] = pos % k;
    }
  } else {
    // Fold ids advance cyclically across class blocks, so per-class counts
    // and total fold sizes both stay within 1.
    auto groups = group_by_label(labels);
    std::size_t offset = 0;
    for (auto& [label, indices] : groups) {
      rng::shuffle(indices, gen);
      for (std::size_t j = 0; j < indices.size(); ++j) {
        plan.assignments[indices[j]] = (offset + j) % k;
      }
      offset = (offset + indices.size()) % k;
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Confusion matrices

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_labels)
    : class_labels_(std::move(class_labels)),
      counts_(class_labels_.size() * class_labels_.size(), 0) {}

std::optional<std::size_t> ConfusionMatrix::index_of(
    std::string_view label) const {
  for (std::size_t i = 0; i < class_labels_.size(); ++i) {
    if (class_labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const std::size_t c : counts_) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::row_sum(std::size_t actual) const {
  std::size_t sum = 0;
  for (std::size_t p = 0; p < class_labels_.size(); ++p) {
    sum += count(actual, p);
  }
  return sum;
}

std::size_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::size_t sum = 0;
  for (std::size_t a = 0; a < class_labels_.size(); ++a) {
    sum += count(a, predicted);
  }
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < class_labels_.size(); ++i) {
    sum += count(i, i);
  }
  return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (class_labels_ != other.class_labels_) {
    throw std::invalid_argument(
        "confusion matrices with different classes cannot be added");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  return *this;
}

void ConfusionMatrix::write_csv(std::ostream& out) const {
  std::vector<std::string> row;
  row.push_back("actual\\predicted");
  for (const std::string& label : class_labels_) row.push_back(label);
  csv::write_row(out, row);
  for (std::size_t a = 0; a < class_labels_.size(); ++a) {
    row.clear();
    row.push_back(class_labels_[a]);
    for (std::size_t p = 0; p < class_labels_.size(); ++p) {
      row.push_back(std::to_string(count(a, p)));
    }
    csv::write_row(out, row);
  }
}

ConfusionMatrix confusion(std::span<const std::string> actual,
                          std::span<const std::string> predicted,
                          std::vector<std::string> class_labels) {
  if (actual.size() != predicted.size()) {
    throw std::invalid_argument(
        "confusion: actual and predicted differ in size");
  }
  ConfusionMatrix cm(std::move(class_labels));
  const auto index = [&](const std::string& label) {
    const auto i = cm.index_of(label);
    if (!i) {
      throw std::invalid_argument("confusion: label '" + label +
                                  "' is not in the class list");
    }
    return *i;
  };
  for (std::size_t i = 0; i < actual.size(); ++i) {
    cm.add(index(actual[i]), index(predicted[i]));
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

std::optional<double> rate(std::size_t numerator, std::size_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

struct BinaryCounts {
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

BinaryCounts collapse(const ConfusionMatrix& cm, std::size_t positive) {
  BinaryCounts b;
  b.tp = cm.count(positive, positive);
  b.fn = cm.row_sum(positive) - b.tp;
  b.fp = cm.column_sum(positive) - b.tp;
  b.tn = cm.total() - b.tp - b.fn - b.fp;
  return b;
}

}  // namespace

MetricsReport binary_metrics(const ConfusionMatrix& cm,
                             std::string_view positive_class) {
  if (cm.class_count() < 2) {
    throw std::invalid_argument("binary_metrics: need at least 2 classes");
  }
  const auto positive = cm.index_of(positive_class);
  if (!positive) {
    throw std::invalid_argument("binary_metrics: positive class '" +
                                std::string(positive_class) +
                                "' is not in the matrix");
  }
  const BinaryCounts b = collapse(cm, *positive);
  MetricsReport report;
  report.positive_class = std::string(positive_class);
  report.sensitivity = rate(b.tp, b.tp + b.fn);
  report.specificity = rate(b.tn, b.tn + b.fp);
  report.ppv = rate(b.tp, b.tp + b.fp);
  report.npv = rate(b.tn, b.tn + b.fn);
  const std::size_t total = cm.total();
  report.accuracy = total == 0 ? 0.0
                               : static_cast<double>(b.tp + b.tn) /
                                     static_cast<double>(total);
  return report;
}

MetricsReport macro_metrics(const ConfusionMatrix& cm) {
  MetricsReport report;
  const std::size_t total = cm.total();
  report.accuracy = total == 0 ? 0.0
                               : static_cast<double>(cm.trace()) /
                                     static_cast<double>(total);
  const auto average = [&](auto pick) -> std::optional<double> {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t k = 0; k < cm.class_count(); ++k) {
      const BinaryCounts b = collapse(cm, k);
      if (const auto value = pick(b)) {
        sum += *value;
        ++defined;
      }
    }
    if (defined == 0) return std::nullopt;
    return sum / static_cast<double>(defined);
  };
  report.sensitivity =
      average([](const BinaryCounts& b) { return rate(b.tp, b.tp + b.fn); });
  report.specificity =
      average([](const BinaryCounts& b) { return rate(b.tn, b.tn + b.fp); });
  report.ppv =
      average([](const BinaryCounts& b) { return rate(b.tp, b.tp + b.fp); });
  report.npv =
      average([](const BinaryCounts& b) { return rate(b.tn, b.tn + b.fn); });
  return report;
}

// ---------------------------------------------------------------------------
// Task pipeline

std::string_view to_string(Task t) {
  switch (t) {
    case Task::Pos: return "pos";
    case Task::Rubric: return "rubric";
    case Task::Sentiment: return "sentiment";
  }
  return "rubric";
}

std::optional<Task> parse_task(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "pos") return Task::Pos;
  if (n == "rubric") return Task::Rubric;
  if (n == "sentiment") return Task::Sentiment;
  return std::nullopt;
}

std::vector<LabeledInstance> extract_instances(
    const Corpus& corpus, Task task, const Lexicon& lexicon,
    double sentiment_epsilon, std::vector<std::string>* warnings) {
  std::vector<LabeledInstance> instances;
  std::size_t empty_skipped = 0;
  std::size_t unlabeled_skipped = 0;
  for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
    const Review& review = corpus.reviews[r];
    for (std::size_t c = 0; c < review.comments.size(); ++c) {
      const Comment& comment = review.comments[c];
      std::vector<std::string> tokens = tokenize(comment.text);
      if (tokens.empty()) {
        ++empty_skipped;
        continue;
      }
      std::string label;
      switch (task) {
        case Task::Pos: {
          const PosProfile profile =
              pos_profile(tag_pos(tokens, lexicon));
          label = std::string(to_string(dominant_tag(profile)));
          break;
        }
        case Task::Sentiment: {
          if (!comment.sentiment_score) {
            ++unlabeled_skipped;
            continue;
          }
          label = std::string(to_string(
              sentiment_class(*comment.sentiment_score, sentiment_epsilon)));
          break;
        }
        case Task::Rubric: {
          if (!comment.label.empty()) {
            label = comment.label;
          } else if (!review.rubric_scores.empty()) {
            // highest score wins, ties to the earlier category
            const RubricScore* best = &review.rubric_scores.front();
            for (const RubricScore& rs : review.rubric_scores) {
              if (rs.score > best->score ||
                  (rs.score == best->score &&
                   rs.category < best->category)) {
                best = &rs;
              }
            }
            label = std::string(to_string(best->category));
          } else {
            ++unlabeled_skipped;
            continue;
          }
          break;
        }
      }
      instances.push_back({std::move(tokens), std::move(label), r, c});
    }
  }
  if (warnings) {
    if (empty_skipped > 0) {
      warnings->push_back(std::to_string(empty_skipped) +
                          " comment(s) with no tokens skipped");
    }
    if (unlabeled_skipped > 0) {
      warnings->push_back(std::to_string(unlabeled_skipped) +
                          " comment(s) without a label for task '" +
                          std::string(to_string(task)) + "' skipped");
    }
  }
  return instances;
}

FeatureVector instance_features(const LabeledInstance& instance,
                                const Vocabulary& vocab,
                                FeatureKind feature_kind,
                                const Lexicon& lexicon) {
  if (feature_kind == FeatureKind::PosProfile) {
    return profile_features(pos_profile(tag_pos(instance.tokens, lexicon)));
  }
  return vectorize(instance.tokens, vocab);
}

CrossValidationResult cross_validate(std::span<const LabeledInstance> data,
                                     const PipelineConfig& config,
                                     const FoldPlan& plan,
                                     const Lexicon& lexicon) {
  if (plan.size() != data.size()) {
    throw std::invalid_argument(
        "cross_validate: fold plan does not cover the data");
  }
  if (data.empty()) {
    throw std::invalid_argument("cross_validate: no labeled instances");
  }

  std::set<std::string> all_labels;
  for (const LabeledInstance& instance : data) {
    all_labels.insert(instance.label);
  }
  CrossValidationResult result;
  result.aggregate = ConfusionMatrix(
      std::vector<std::string>(all_labels.begin(), all_labels.end()));

  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (plan.fold_of(i) == fold ? test_indices : train_indices).push_back(i);
    }

    std::vector<std::vector<std::string>> train_docs;
    std::vector<std::string> train_labels;
    train_docs.reserve(train_indices.size());
    for (const std::size_t i : train_indices) {
      train_docs.push_back(data[i].tokens);
      train_labels.push_back(data[i].label);
    }

    std::set<std::string> train_classes(train_labels.begin(),
                                        train_labels.end());
    for (const std::size_t i : test_indices) {
      if (!train_classes.contains(data[i].label)) {
        result.warnings.push_back(
            "fold " + std::to_string(fold) + ": class '" + data[i].label +
            "' missing from the training complement");
        break;
      }
    }

    // vocabulary from the training complement only
    Vocabulary vocab;
    std::size_t alphabet = kPosTagCount;
    std::string vocab_hash;
    if (config.feature_kind == FeatureKind::TokenCounts) {
      vocab = build_vocabulary(train_docs, config.min_frequency);
      if (vocab.size() == 0) {
        throw DataError("cross_validate: fold " + std::to_string(fold) +
                        " has an empty training vocabulary");
      }
      alphabet = vocab.size();
      vocab_hash = vocab.hash();
    }

    TrainConfig train_config;
    train_config.alpha = config.alpha;
    train_config.feature_kind = config.feature_kind;
    train_config.vocabulary_size = alphabet;
    train_config.vocabulary_hash = vocab_hash;
    train_config.class_labels.assign(train_classes.begin(),
                                     train_classes.end());

    std::vector<FeatureVector> train_features;
    train_features.reserve(train_indices.size());
    for (const std::size_t i : train_indices) {
      train_features.push_back(
          instance_features(data[i], vocab, config.feature_kind, lexicon));
    }
    const NaiveBayesModel model =
        NaiveBayesModel::train(train_features, train_labels, train_config);

    std::size_t correct = 0;
    for (const std::size_t i : test_indices) {
      const std::string& predicted = model.predict(
          instance_features(data[i], vocab, config.feature_kind, lexicon));
      const auto a = result.aggregate.index_of(data[i].label);
      const auto p = result.aggregate.index_of(predicted);
      result.aggregate.add(*a, *p);
      if (data[i].label == predicted) ++correct;
    }
    result.metrics.per_fold_accuracies.push_back(
        static_cast<double>(correct) /
        static_cast<double>(test_indices.size()));
  }

  // rates from the aggregate matrix; accuracy is trace/n
  MetricsReport rates;
  if (result.aggregate.class_count() < 2) {
    result.warnings.push_back(
        "single-class evaluation; predictive rates are undefined");
    rates.positive_class = config.positive_class;
  } else if (!config.positive_class.empty()) {
    if (result.aggregate.index_of(config.positive_class)) {
      rates = binary_metrics(result.aggregate, config.positive_class);
    } else {
      result.warnings.push_back("positive class '" + config.positive_class +
                                "' never occurs; reporting macro averages");
      rates = macro_metrics(result.aggregate);
    }
  } else {
    rates = macro_metrics(result.aggregate);
  }
  rates.per_fold_accuracies = std::move(result.metrics.per_fold_accuracies);
  rates.accuracy = static_cast<double>(result.aggregate.trace()) /
                   static_cast<double>(result.aggregate.total());

  double mean = 0.0;
  for (const double a : rates.per_fold_accuracies) mean += a;
  mean /= static_cast<double>(rates.per_fold_accuracies.size());
  rates.accuracy_mean = mean;
  if (rates.per_fold_accuracies.size() > 1) {
    double ss = 0.0;
    for (const double a : rates.per_fold_accuracies) {
      ss += (a - mean) * (a - mean);
    }
    rates.accuracy_std = std::sqrt(
        ss / static_cast<double>(rates.per_fold_accuracies.size() - 1));
  }
  result.metrics = std::move(rates);
  return result;
}

CrossValidationResult cross_validate(const Corpus& corpus,
                                     const PipelineConfig& config,
                                     const FoldPlan& plan,
                                     const Lexicon& lexicon) {
  std::vector<std::string> warnings;
  const std::vector<LabeledInstance> data = extract_instances(
      corpus, config.task, lexicon, config.sentiment_epsilon, &warnings);
  CrossValidationResult result = cross_validate(data, config, plan, lexicon);
  result.warnings.insert(result.warnings.begin(), warnings.begin(),
                         warnings.end());
  return result;
}

// ---------------------------------------------------------------------------
// Two-proportion test

double chi_squared1_sf(double statistic) {
  if (statistic <= 0.0) return 1.0;
  return std::erfc(std::sqrt(statistic / 2.0));
}

ProportionTestResult two_proportion_test(std::size_t x1, std::size_t n1,
                                         std::size_t x2, std::size_t n2,
                                         bool continuity) {
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("two_proportion_test: empty sample");
  }
  if (x1 > n1 || x2 > n2) {
    throw std::invalid_argument(
        "two_proportion_test: successes exceed the sample size");
  }

  ProportionTestResult result;
  result.continuity_corrected = continuity;

  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(x1 + x2) /
                        static_cast<double>(n1 + n2);
  const double inv = 1.0 / static_cast<double>(n1) +
                     1.0 / static_cast<double>(n2);
  const double denom = pooled * (1.0 - pooled) * inv;
  if (denom <= 0.0) {  // both samples all-success or all-failure
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  double diff = std::abs(p1 - p2);
  if (continuity) diff = std::max(0.0, diff - inv / 2.0);
  result.statistic = diff * diff / denom;
  result.p_value = chi_squared1_sf(result.statistic);
  return result;
}

// ---------------------------------------------------------------------------
// Metric feasibility

std::string_view to_string(FeasibilityVerdict v) {
  switch (v) {
    case FeasibilityVerdict::Feasible: return "feasible";
    case FeasibilityVerdict::Infeasible: return "infeasible";
    case FeasibilityVerdict::AnyPrevalence: return "any_prevalence";
  }
  return "infeasible";
}

FeasibilityResult metric_feasibility(double sensitivity, double specificity,
                                     double accuracy,
                                     std::optional<double> ppv) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(sensitivity) || !in_unit(specificity) || !in_unit(accuracy) ||
      (ppv && !in_unit(*ppv))) {
    throw std::invalid_argument("metric_feasibility: rates must be in [0,1]");
  }

  FeasibilityResult result;
  if (sensitivity == specificity) {
    if (accuracy == sensitivity) {
      result.verdict = FeasibilityVerdict::AnyPrevalence;
      result.note = "accuracy equals the common rate; any prevalence fits";
    } else {
      result.verdict = FeasibilityVerdict::Infeasible;
      result.note =
          "sensitivity equals specificity but accuracy differs; no "
          "prevalence fits";
    }
  } else {
    const double prevalence =
        (accuracy - specificity) / (sensitivity - specificity);
    result.prevalence = prevalence;
    if (prevalence >= 0.0 && prevalence <= 1.0) {
      result.verdict = FeasibilityVerdict::Feasible;
    } else {
      result.verdict = FeasibilityVerdict::Infeasible;
      result.note = "prevalence solves outside [0, 1]";
    }
  }

  if (ppv) {
    const double a = *ppv * (1.0 - specificity);
    const double b = sensitivity * (1.0 - *ppv);
    if (b > 0.0) {
      const double t = a / b;
      result.ppv_implied_prevalence = t / (1.0 + t);
    } else if (a > 0.0) {
      result.ppv_implied_prevalence = 1.0;
    }
    if (result.prevalence && result.ppv_implied_prevalence &&
        std::abs(*result.prevalence - *result.ppv_implied_prevalence) >
            0.01) {
      result.ppv_consistent = false;
      if (!result.note.empty()) result.note += "; ";
      result.note += "ppv implies a different prevalence";
    }
  }
  return result;
}

}  // namespace revmine
