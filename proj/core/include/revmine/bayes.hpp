#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revmine/textproc.hpp"

// Multinomial naive Bayes with Laplace smoothing. Training counts feature
// occurrences per class; scoring runs entirely in log space and posteriors
// are normalized across classes with log-sum-exp, which keeps the argmax of
// the unnormalized scores and returns a true distribution.

namespace revmine {

enum class FeatureKind : std::uint8_t { TokenCounts = 0, PosProfile };

std::string_view to_string(FeatureKind k);
std::optional<FeatureKind> parse_feature_kind(std::string_view name);

// Builds the 5-slot categorical feature vector for pos-profile models.
FeatureVector profile_features(const PosProfile& profile);

struct Posterior {
  // Aligned with the model's class_labels; sums to 1 within 1e-9.
  std::vector<double> probabilities;
};

struct TrainConfig {
  double alpha = 1.0;                 // pseudo-count, must be > 0
  FeatureKind feature_kind = FeatureKind::TokenCounts;
  std::size_t vocabulary_size = 0;    // feature alphabet size n, must be > 0
  std::string vocabulary_hash;        // pairs a model with its vocabulary
  // Declared classes; empty means infer from labels. A declared class with
  // zero training examples is an error naming the class.
  std::vector<std::string> class_labels;
};

class NaiveBayesModel {
 public:
  // prior(k) = count(k)/N; likelihood(i|k) = (c_ik + a)/(T_k + a*n) with
  // T_k the in-vocabulary feature total of class k, so the likelihoods of
  // the n alphabet slots sum to exactly 1. Out-of-vocabulary tokens score
  // with the smoothed floor a/(T_k + a*n).
  static NaiveBayesModel train(std::span<const FeatureVector> features,
                               std::span<const std::string> labels,
                               const TrainConfig& config);

  // score(k) = log prior(k) + sum_i count_i * log likelihood(i|k)
  //          + oov_count * log oov(k). Unnormalized.
  std::vector<double> log_posteriors(const FeatureVector& x) const;
  Posterior posteriors(const FeatureVector& x) const;
  // Argmax posterior; ties go to the lexicographically smallest label.
  const std::string& predict(const FeatureVector& x) const;

  const std::vector<std::string>& class_labels() const {
    return class_labels_;
  }
  std::size_t class_count() const { return class_labels_.size(); }
  double alpha() const { return alpha_; }
  FeatureKind feature_kind() const { return feature_kind_; }
  std::size_t vocabulary_size() const { return vocabulary_size_; }
  const std::string& vocabulary_hash() const { return vocabulary_hash_; }

  std::size_t class_example_count(std::size_t k) const {
    return class_counts_[k];
  }
  std::size_t total_examples() const { return total_examples_; }
  // count(k)/N, the exact empirical frequency.
  double prior(std::size_t k) const;
  double log_prior(std::size_t k) const { return log_priors_[k]; }
  double log_likelihood(std::size_t k, std::size_t feature) const {
    return log_likelihoods_[k * vocabulary_size_ + feature];
  }
  double log_oov(std::size_t k) const { return log_oov_[k]; }

  // Versioned JSON; load refuses unknown versions and mismatched
  // vocabulary hashes and reports the byte offset of syntax errors.
  void save(std::ostream& out) const;
  static NaiveBayesModel load(std::istream& in,
                              std::string_view expected_vocabulary_hash = "");

  bool operator==(const NaiveBayesModel&) const = default;

 private:
  NaiveBayesModel() = default;

  std::vector<std::string> class_labels_;
  std::vector<std::size_t> class_counts_;
  std::size_t total_examples_ = 0;
  double alpha_ = 1.0;
  FeatureKind feature_kind_ = FeatureKind::TokenCounts;
  std::size_t vocabulary_size_ = 0;
  std::string vocabulary_hash_;
  std::vector<double> log_priors_;
  std::vector<double> log_likelihoods_;  // class-major, class_count * n
  std::vector<double> log_oov_;
};

}  // namespace revmine
