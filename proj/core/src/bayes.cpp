#include "revmine/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "revmine/error.hpp"

namespace revmine {

namespace {

using nlohmann::json;

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "revmine-nb";

}  // namespace

std::string_view to_string(FeatureKind k) {
  return k == FeatureKind::TokenCounts ? "token_counts" : "pos_profile";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  std::string n = lower_ascii(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "token_counts") return FeatureKind::TokenCounts;
  if (n == "pos_profile") return FeatureKind::PosProfile;
  return std::nullopt;
}

FeatureVector profile_features(const PosProfile& profile) {
  FeatureVector fv;
  for (std::size_t i = 0; i < profile.counts.size(); ++i) {
    if (profile.counts[i] > 0) fv.token_counts[i] = profile.counts[i];
  }
  fv.pos_profile = profile;
  fv.length = profile.token_total;
  return fv;
}

NaiveBayesModel NaiveBayesModel::train(std::span<const FeatureVector> features,
                                       std::span<const std::string> labels,
                                       const TrainConfig& config) {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("train: features and labels differ in size");
  }
  if (features.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  if (!(config.alpha > 0.0)) {
    throw std::invalid_argument("train: alpha must be > 0");
  }
  if (config.vocabulary_size == 0) {
    throw std::invalid_argument("train: vocabulary_size must be > 0");
  }

  NaiveBayesModel m;
  m.alpha_ = config.alpha;
  m.feature_kind_ = config.feature_kind;
  m.vocabulary_size_ = config.vocabulary_size;
  m.vocabulary_hash_ = config.vocabulary_hash;
  if (config.class_labels.empty()) {
    const std::set<std::string> unique(labels.begin(), labels.end());
    m.class_labels_.assign(unique.begin(), unique.end());
  } else {
    m.class_labels_ = config.class_labels;
  }

  std::unordered_map<std::string_view, std::size_t> class_index;
  for (std::size_t k = 0; k < m.class_labels_.size(); ++k) {
    class_index.emplace(m.class_labels_[k], k);
  }

  const std::size_t n = m.vocabulary_size_;
  const std::size_t classes = m.class_labels_.size();
  m.class_counts_.assign(classes, 0);
  std::vector<std::size_t> feature_counts(classes * n, 0);
  std::vector<std::size_t> class_totals(classes, 0);

  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto it = class_index.find(labels[i]);
    if (it == class_index.end()) {
      throw std::invalid_argument("train: label '" + labels[i] +
                                  "' is not a declared class");
    }
    const std::size_t k = it->second;
    ++m.class_counts_[k];
    for (const auto& [feature, count] : features[i].token_counts) {
      if (feature >= n) {
        throw std::invalid_argument(
            "train: feature index exceeds the vocabulary size");
      }
      feature_counts[k * n + feature] += count;
      class_totals[k] += count;
    }
  }

  for (std::size_t k = 0; k < classes; ++k) {
    if (m.class_counts_[k] == 0) {
      throw std::invalid_argument("train: class '" + m.class_labels_[k] +
                                  "' has no training examples");
    }
  }

  m.total_examples_ = features.size();
  m.log_priors_.resize(classes);
  m.log_likelihoods_.resize(classes * n);
  m.log_oov_.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    m.log_priors_[k] = std::log(m.prior(k));
    // denominator counts in-vocabulary mass only, so the n likelihoods
    // of a class sum to exactly 1
    const double denom = static_cast<double>(class_totals[k]) +
                         m.alpha_ * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.log_likelihoods_[k * n + i] = std::log(
          (static_cast<double>(feature_counts[k * n + i]) + m.alpha_) /
          denom);
    }
    m.log_oov_[k] = std::log(m.alpha_ / denom);
  }
  return m;
}

double NaiveBayesModel::prior(std::size_t k) const {
  return static_cast<double>(class_counts_[k]) /
         static_cast<double>(total_examples_);
}

std::vector<double> NaiveBayesModel::log_posteriors(
    const FeatureVector& x) const {
  std::vector<double> scores(log_priors_);
  for (const auto& [feature, count] : x.token_counts) {
    if (feature >= vocabulary_size_) {
      throw std::invalid_argument(
          "log_posteriors: feature index exceeds the vocabulary size");
    }
    for (std::size_t k = 0; k < scores.size(); ++k) {
      scores[k] += static_cast<double>(count) *
                   log_likelihoods_[k * vocabulary_size_ + feature];
    }
  }
  if (x.oov_count > 0) {
    for (std::size_t k = 0; k < scores.size(); ++k) {
      scores[k] += static_cast<double>(x.oov_count) * log_oov_[k];
    }
  }
  return scores;
}

Posterior NaiveBayesModel::posteriors(const FeatureVector& x) const {
  const std::vector<double> scores = log_posteriors(x);
  const double peak = *std::max_element(scores.begin(), scores.end());
  Posterior p;
  p.probabilities.resize(scores.size());
  double total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    p.probabilities[k] = std::exp(scores[k] - peak);
    total += p.probabilities[k];
  }
  for (double& value : p.probabilities) value /= total;
  return p;
}

const std::string& NaiveBayesModel::predict(const FeatureVector& x) const {
  const std::vector<double> scores = log_posteriors(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best] ||
        (scores[k] == scores[best] &&
         class_labels_[k] < class_labels_[best])) {
      best = k;
    }
  }
  return class_labels_[best];
}

void NaiveBayesModel::save(std::ostream& out) const {
  json object;
  object["format"] = kModelFormat;
  object["version"] = kModelVersion;
  object["alpha"] = alpha_;
  object["feature_kind"] = std::string(to_string(feature_kind_));
  object["class_labels"] = class_labels_;
  object["class_counts"] = class_counts_;
  object["total_examples"] = total_examples_;
  object["vocabulary_size"] = vocabulary_size_;
  object["vocabulary_hash"] = vocabulary_hash_;
  object["log_priors"] = log_priors_;
  json rows = json::array();
  for (std::size_t k = 0; k < class_labels_.size(); ++k) {
    rows.push_back(std::vector<double>(
        log_likelihoods_.begin() + static_cast<std::ptrdiff_t>(k * vocabulary_size_),
        log_likelihoods_.begin() + static_cast<std::ptrdiff_t>((k + 1) * vocabulary_size_)));
  }
  object["log_likelihoods"] = std::move(rows);
  object["log_oov"] = log_oov_;
  out << object.dump(2) << '\n';
}

NaiveBayesModel NaiveBayesModel::load(std::istream& in,
                                      std::string_view expected_vocabulary_hash) {
  json object;
  try {
    object = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("model file corrupted at byte " + std::to_string(e.byte) +
                    ": " + e.what());
  }
  try {
    if (!object.is_object() || object.value("format", "") != kModelFormat) {
      throw DataError("not a classifier model file");
    }
    if (object.value("version", -1) != kModelVersion) {
      throw DataError("unsupported model version " +
                      object.value("version", json{}).dump());
    }
    NaiveBayesModel m;
    m.alpha_ = object.at("alpha").get<double>();
    const auto kind =
        parse_feature_kind(object.at("feature_kind").get<std::string>());
    if (!kind) throw DataError("unknown feature_kind in model file");
    m.feature_kind_ = *kind;
    m.class_labels_ = object.at("class_labels").get<std::vector<std::string>>();
    m.class_counts_ =
        object.at("class_counts").get<std::vector<std::size_t>>();
    m.total_examples_ = object.at("total_examples").get<std::size_t>();
    m.vocabulary_size_ = object.at("vocabulary_size").get<std::size_t>();
    m.vocabulary_hash_ = object.at("vocabulary_hash").get<std::string>();
    m.log_priors_ = object.at("log_priors").get<std::vector<double>>();
    for (const auto& row :
         object.at("log_likelihoods").get<std::vector<std::vector<double>>>()) {
      m.log_likelihoods_.insert(m.log_likelihoods_.end(), row.begin(),
                                row.end());
    }
    m.log_oov_ = object.at("log_oov").get<std::vector<double>>();

    const std::size_t classes = m.class_labels_.size();
    if (classes == 0 || m.class_counts_.size() != classes ||
        m.log_priors_.size() != classes || m.log_oov_.size() != classes ||
        m.log_likelihoods_.size() != classes * m.vocabulary_size_ ||
        !(m.alpha_ > 0.0)) {
      throw DataError("model file is internally inconsistent");
    }
    if (!expected_vocabulary_hash.empty() &&
        m.vocabulary_hash_ != expected_vocabulary_hash) {
      throw DataError("model was trained against a different vocabulary "
                      "(hash mismatch)");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError("model file corrupted: " + std::string(e.what()));
  }
}

}  // namespace revmine
