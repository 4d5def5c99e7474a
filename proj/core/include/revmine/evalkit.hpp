#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revmine/bayes.hpp"
#include "revmine/corpus.hpp"
#include "revmine/textproc.hpp"

// Validation machinery: holdout splits, stratified k-fold plans, confusion
// matrices with the four predictive-value metrics, cross-validation over the
// corpus pipeline, a pooled two-proportion test, and a feasibility auditor
// for reported metric sets.

namespace revmine {

// ---------------------------------------------------------------------------
// Splits and fold plans

struct SplitSpec {
  double train_fraction = 0.8;  // in (0,1)
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

// Disjoint, exhaustive, |train| = round(fraction*n); deterministic per
// (n, spec, labels). Stratified mode keeps per-class train counts within
// one of the proportional share; a singleton class goes to train with a
// warning. Fractions outside [0.7, 0.8] also warn.
SplitResult holdout_split(std::size_t n, const SplitSpec& spec,
                          std::span<const std::string> labels = {});

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // record index -> fold id
  std::uint64_t seed = 0;
  bool stratified = false;

  std::size_t size() const { return assignments.size(); }
  std::size_t fold_of(std::size_t index) const { return assignments[index]; }
  std::vector<std::size_t> fold_indices(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Fold sizes differ by at most 1; stratified keeps per-class counts across
// folds within 1. Requires 2 <= k <= n.
FoldPlan kfold_plan(std::size_t n, std::size_t k, std::uint64_t seed,
                    bool stratified,
                    std::span<const std::string> labels = {});

// ---------------------------------------------------------------------------
// Confusion matrices and metrics

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_labels);

  const std::vector<std::string>& class_labels() const {
    return class_labels_;
  }
  std::size_t class_count() const { return class_labels_.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  std::size_t count(std::size_t actual, std::size_t predicted) const {
    return counts_[actual * class_labels_.size() + predicted];
  }
  void add(std::size_t actual, std::size_t predicted, std::size_t n = 1) {
    counts_[actual * class_labels_.size() + predicted] += n;
  }

  std::size_t total() const;
  std::size_t row_sum(std::size_t actual) const;
  std::size_t column_sum(std::size_t predicted) const;
  std::size_t trace() const;

  // Same class labels required.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  // Labeled header row and column; "actual\predicted" corner cell.
  void write_csv(std::ostream& out) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> class_labels_;
  std::vector<std::size_t> counts_;  // actual-major
};

ConfusionMatrix confusion(std::span<const std::string> actual,
                          std::span<const std::string> predicted,
                          std::vector<std::string> class_labels);

struct MetricsReport {
  // Zero-denominator rates are absent rather than NaN.
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> ppv;
  std::optional<double> npv;
  double accuracy = 0.0;
  std::string positive_class;  // empty means macro-averaged rates
  std::vector<double> per_fold_accuracies;
  std::optional<double> accuracy_mean;
  std::optional<double> accuracy_std;  // sample (n-1) deviation
};

// One-vs-rest collapse of `cm` onto positive_class: sens TP/(TP+FN),
// spec TN/(TN+FP), ppv TP/(TP+FP), npv TN/(TN+FN), accuracy (TP+TN)/total.
MetricsReport binary_metrics(const ConfusionMatrix& cm,
                             std::string_view positive_class);

// Macro-average of the one-vs-rest rates over all classes; accuracy is
// trace/total.
MetricsReport macro_metrics(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Task pipeline

enum class Task : std::uint8_t { Pos = 0, Rubric, Sentiment };

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view name);

struct PipelineConfig {
  Task task = Task::Rubric;
  FeatureKind feature_kind = FeatureKind::TokenCounts;
  double alpha = 1.0;
  std::size_t min_frequency = 1;  // vocabulary floor
  double sentiment_epsilon = kDefaultSentimentEpsilon;
  // One-vs-rest positive class for the metric report; empty = macro.
  std::string positive_class;
};

struct LabeledInstance {
  std::vector<std::string> tokens;
  std::string label;
  std::size_t review_index = 0;
  std::size_t comment_index = 0;
};

// One instance per comment that carries a label for `task`: pos uses the
// dominant lexicon tag, sentiment discretizes sentiment_score (unlabeled
// comments are skipped with a warning), rubric uses the comment's recorded
// class when present, else the review's highest-scoring rubric category.
std::vector<LabeledInstance> extract_instances(
    const Corpus& corpus, Task task, const Lexicon& lexicon,
    double sentiment_epsilon = kDefaultSentimentEpsilon,
    std::vector<std::string>* warnings = nullptr);

// Feature vector for one instance under the configured feature kind.
FeatureVector instance_features(const LabeledInstance& instance,
                                const Vocabulary& vocab,
                                FeatureKind feature_kind,
                                const Lexicon& lexicon);

struct CrossValidationResult {
  MetricsReport metrics;  // rates from the aggregate matrix, per-fold stats
  ConfusionMatrix aggregate;
  std::vector<std::string> warnings;
};

// For each fold: vocabulary and model are built on the complement only,
// then the fold is scored; the aggregate matrix is the sum over folds and
// metrics.accuracy equals trace(aggregate)/n. A class present in a fold but
// absent from its training complement is recorded as a warning and the fold
// is still evaluated.
CrossValidationResult cross_validate(std::span<const LabeledInstance> data,
                                     const PipelineConfig& config,
                                     const FoldPlan& plan,
                                     const Lexicon& lexicon);
CrossValidationResult cross_validate(const Corpus& corpus,
                                     const PipelineConfig& config,
                                     const FoldPlan& plan,
                                     const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Two-proportion test

struct ProportionTestResult {
  double statistic = 0.0;  // chi-squared, 1 degree of freedom
  double p_value = 1.0;
  bool continuity_corrected = false;
};

// Pooled chi-squared test of x1/n1 vs x2/n2. With continuity the absolute
// difference is reduced by (1/n1 + 1/n2)/2 and floored at 0 before
// squaring. Two-sided p from the chi-squared(1) survival function.
ProportionTestResult two_proportion_test(std::size_t x1, std::size_t n1,
                                         std::size_t x2, std::size_t n2,
                                         bool continuity);

// chi-squared(1) survival function, exposed for reuse and direct checks.
double chi_squared1_sf(double statistic);

// ---------------------------------------------------------------------------
// Metric feasibility

enum class FeasibilityVerdict : std::uint8_t {
  Feasible = 0,
  Infeasible,
  AnyPrevalence,  // sens = spec = accuracy; every prevalence fits
};

std::string_view to_string(FeasibilityVerdict v);

struct FeasibilityResult {
  FeasibilityVerdict verdict = FeasibilityVerdict::Feasible;
  // Solution of accuracy = sens*p + spec*(1-p); present whenever the
  // equation has a unique solution, even an out-of-range one.
  std::optional<double> prevalence;
  std::optional<double> ppv_implied_prevalence;
  bool ppv_consistent = true;  // false when the two prevalences differ > 0.01
  std::string note;
};

// Audits whether a reported (sensitivity, specificity, accuracy[, ppv])
// tuple can come from one binary confusion matrix.
FeasibilityResult metric_feasibility(double sensitivity, double specificity,
                                     double accuracy,
                                     std::optional<double> ppv = std::nullopt);

}  // namespace revmine
