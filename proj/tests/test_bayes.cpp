#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "revmine/bayes.hpp"
#include "revmine/error.hpp"
#include "revmine/textproc.hpp"

using namespace revmine;

namespace {

// Three two-token documents over the vocabulary {bad, chart, good, labels}.
struct Worked {
  Vocabulary vocab;
  std::vector<FeatureVector> features;
  std::vector<std::string> labels;
  NaiveBayesModel model;

  Worked()
      : vocab(Vocabulary::from_tokens({"good", "chart", "labels", "bad"})) {
    const std::vector<std::vector<std::string>> docs = {
        {"good", "chart"}, {"good", "labels"}, {"bad", "chart"}};
    labels = {"A", "A", "B"};
    for (const auto& d : docs) features.push_back(vectorize(d, vocab));
    TrainConfig config;
    config.vocabulary_size = vocab.size();
    config.vocabulary_hash = vocab.hash();
    model = NaiveBayesModel::train(features, labels, config);
  }

  FeatureVector query(const std::vector<std::string>& tokens) const {
    return vectorize(tokens, vocab);
  }
};

}  // namespace

TEST_CASE("training recovers exact priors and smoothed likelihoods") {
  const Worked w;
  REQUIRE(w.model.class_labels() == std::vector<std::string>{"A", "B"});
  CHECK(w.model.prior(0) == 2.0 / 3.0);
  CHECK(w.model.prior(1) == 1.0 / 3.0);
  CHECK(w.model.class_example_count(0) == 2);
  CHECK(w.model.total_examples() == 3);

  // class A saw 4 tokens: good x2, chart, labels; alphabet size 4.
  const auto idx = [&](const char* t) { return *w.vocab.lookup(t); };
  CHECK(std::exp(w.model.log_likelihood(0, idx("good"))) ==
        doctest::Approx(3.0 / 8.0).epsilon(1e-12));
  CHECK(std::exp(w.model.log_likelihood(0, idx("chart"))) ==
        doctest::Approx(2.0 / 8.0).epsilon(1e-12));
  CHECK(std::exp(w.model.log_likelihood(0, idx("bad"))) ==
        doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  // class B saw 2 tokens: bad, chart.
  CHECK(std::exp(w.model.log_likelihood(1, idx("bad"))) ==
        doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(std::exp(w.model.log_likelihood(1, idx("good"))) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  // per class, the n likelihood slots are a distribution
  for (std::size_t k = 0; k < 2; ++k) {
    double sum = 0;
    for (std::size_t i = 0; i < 4; ++i)
      sum += std::exp(w.model.log_likelihood(k, i));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("posterior of the worked query is 27/35") {
  const Worked w;
  const auto q = w.query({"good", "chart"});
  const Posterior p = w.model.posteriors(q);
  REQUIRE(p.probabilities.size() == 2);
  CHECK(p.probabilities[0] == doctest::Approx(27.0 / 35.0).epsilon(1e-12));
  CHECK(p.probabilities[1] == doctest::Approx(8.0 / 35.0).epsilon(1e-12));
  CHECK(p.probabilities[0] + p.probabilities[1] ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.model.predict(q) == "A");
}

TEST_CASE("posteriors are the softmax of the log scores") {
  const Worked w;
  const auto q = w.query({"bad", "bad", "labels"});
  const auto logs = w.model.log_posteriors(q);
  const Posterior p = w.model.posteriors(q);
  const double m = std::max(logs[0], logs[1]);
  const double z = std::exp(logs[0] - m) + std::exp(logs[1] - m);
  CHECK(p.probabilities[0] == doctest::Approx(std::exp(logs[0] - m) / z)
                                  .epsilon(1e-12));
  CHECK(w.model.predict(q) == "B");
}

TEST_CASE("out-of-vocabulary tokens take the smoothed floor") {
  const Worked w;
  FeatureVector q;
  q.oov_count = 2;
  q.length = 2;
  const auto logs = w.model.log_posteriors(q);
  // score = log prior + 2 * log(alpha / (T_k + alpha*n))
  CHECK(logs[0] == doctest::Approx(std::log(2.0 / 3.0) + 2 * std::log(1.0 / 8.0))
                       .epsilon(1e-12));
  CHECK(logs[1] == doctest::Approx(std::log(1.0 / 3.0) + 2 * std::log(1.0 / 6.0))
                       .epsilon(1e-12));
  CHECK(std::exp(w.model.log_oov(0)) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("alpha scales the smoothing") {
  const Worked base;
  TrainConfig config;
  config.alpha = 2.0;
  config.vocabulary_size = 4;
  const auto model = NaiveBayesModel::train(base.features, base.labels, config);
  // (2 + 2) / (4 + 2*4) for 'good' in class A
  const auto idx = *base.vocab.lookup("good");
  CHECK(std::exp(model.log_likelihood(0, idx)) ==
        doctest::Approx(4.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("prediction ties break to the smallest label") {
  // perfectly symmetric classes: every query ties
  const auto vocab = Vocabulary::from_tokens({"x", "y"});
  const std::vector<FeatureVector> features = {
      vectorize(std::vector<std::string>{"x"}, vocab),
      vectorize(std::vector<std::string>{"y"}, vocab)};
  const std::vector<std::string> labels = {"zeta", "alpha"};
  TrainConfig config;
  config.vocabulary_size = 2;
  const auto model = NaiveBayesModel::train(features, labels, config);
  REQUIRE(model.class_labels() == std::vector<std::string>{"alpha", "zeta"});
  FeatureVector empty;
  CHECK(model.predict(empty) == "alpha");
}

TEST_CASE("training validates its inputs") {
  const Worked w;
  TrainConfig config;
  config.vocabulary_size = 4;

  CHECK_THROWS_AS(NaiveBayesModel::train({}, {}, config),
                  std::invalid_argument);

  const std::vector<std::string> short_labels = {"A"};
  CHECK_THROWS_AS(NaiveBayesModel::train(w.features, short_labels, config),
                  std::invalid_argument);

  TrainConfig bad_alpha = config;
  bad_alpha.alpha = 0.0;
  CHECK_THROWS_AS(NaiveBayesModel::train(w.features, w.labels, bad_alpha),
                  std::invalid_argument);

  TrainConfig no_vocab = config;
  no_vocab.vocabulary_size = 0;
  CHECK_THROWS_AS(NaiveBayesModel::train(w.features, w.labels, no_vocab),
                  std::invalid_argument);

  TrainConfig declared = config;
  declared.class_labels = {"A", "B", "C"};
  try {
    NaiveBayesModel::train(w.features, w.labels, declared);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("C") != std::string::npos);
  }
}

TEST_CASE("declared classes can widen the label set order") {
  const Worked w;
  TrainConfig config;
  config.vocabulary_size = 4;
  config.class_labels = {"B", "A"};  // declaration order is preserved
  const auto model = NaiveBayesModel::train(w.features, w.labels, config);
  CHECK(model.class_labels() == std::vector<std::string>{"B", "A"});
  CHECK(model.prior(0) == 1.0 / 3.0);
}

TEST_CASE("pos-profile features train through the same interface") {
  Lexicon lex;
  lex.add_word("chart", PosTag::Noun);
  lex.add_word("shows", PosTag::Verb);
  lex.add_word("ugly", PosTag::Adjective);
  const auto fv = [&](const std::vector<std::string>& tokens) {
    return profile_features(pos_profile(tag_pos(tokens, lex)));
  };
  const std::vector<FeatureVector> features = {fv({"chart", "chart"}),
                                               fv({"ugly", "ugly"})};
  const std::vector<std::string> labels = {"noun", "adjective"};
  TrainConfig config;
  config.feature_kind = FeatureKind::PosProfile;
  config.vocabulary_size = kPosTagCount;
  const auto model = NaiveBayesModel::train(features, labels, config);
  CHECK(model.feature_kind() == FeatureKind::PosProfile);
  CHECK(model.predict(fv({"chart", "shows"})) == "noun");
  CHECK(model.predict(fv({"ugly"})) == "adjective");
}

TEST_CASE("model save/load round trips exactly") {
  const Worked w;
  std::ostringstream out;
  w.model.save(out);
  std::istringstream in(out.str());
  const auto back = NaiveBayesModel::load(in);
  CHECK(back == w.model);

  // loading twice from the same bytes is stable
  std::istringstream in2(out.str());
  CHECK(NaiveBayesModel::load(in2) == back);
}

TEST_CASE("load enforces the vocabulary pairing") {
  const Worked w;
  std::ostringstream out;
  w.model.save(out);

  std::istringstream ok(out.str());
  CHECK_NOTHROW(NaiveBayesModel::load(ok, w.vocab.hash()));

  std::istringstream bad(out.str());
  CHECK_THROWS_AS(NaiveBayesModel::load(bad, "feedfeedfeedfeed"), DataError);
}

TEST_CASE("load rejects corrupted or foreign payloads") {
  {
    std::istringstream in("this is not json");
    try {
      NaiveBayesModel::load(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
  {
    std::istringstream in(R"({"format": "something-else"})");
    CHECK_THROWS_AS(NaiveBayesModel::load(in), DataError);
  }
  {
    const Worked w;
    std::ostringstream out;
    w.model.save(out);
    std::string text = out.str();
    const auto pos = text.find("\"version\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"version\"").size(), "\"vers10n\"");
    std::istringstream in(text);
    CHECK_THROWS_AS(NaiveBayesModel::load(in), DataError);
  }
}

TEST_CASE("feature kind names round trip") {
  CHECK(to_string(FeatureKind::TokenCounts) == "token_counts");
  CHECK(parse_feature_kind("pos_profile") == FeatureKind::PosProfile);
  CHECK(!parse_feature_kind("tfidf").has_value());
}
