#pragma once

// Independent reference for the multinomial classifier. Probabilities are
// ratios of unsigned 128-bit integers reduced eagerly, so every prior,
// likelihood and unnormalized posterior is exact. Sized for micro-corpora:
// with at most 5 documents of at most 6 tokens and a single-digit alpha the
// worst products stay far below 2^127.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nboracle {

using u128 = unsigned __int128;

inline u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct Rat {
  u128 num = 0;
  u128 den = 1;

  void reduce() {
    if (num == 0) {
      den = 1;
      return;
    }
    const u128 g = gcd128(num, den);
    num /= g;
    den /= g;
  }

  // Cross-reduces before multiplying to keep intermediates small.
  Rat times(Rat o) const {
    Rat a{num, o.den};
    a.reduce();
    Rat b{o.num, den};
    b.reduce();
    Rat r{a.num * b.num, a.den * b.den};
    r.reduce();
    return r;
  }

  Rat plus(const Rat& o) const {
    Rat r{num * o.den + o.num * den, den * o.den};
    r.reduce();
    return r;
  }

  bool less(const Rat& o) const { return num * o.den < o.num * den; }

  double value() const {
    return static_cast<double>(static_cast<long double>(num) /
                               static_cast<long double>(den));
  }
};

struct Doc {
  std::vector<std::string> tokens;
  std::string label;
};

struct Result {
  std::vector<std::string> classes;  // sorted ascending
  std::vector<double> posteriors;    // aligned with classes
  std::string prediction;            // argmax, ties to the smallest label
};

inline Result classify(const std::vector<Doc>& train,
                       const std::vector<std::string>& query,
                       unsigned alpha = 1) {
  std::set<std::string> class_set;
  std::set<std::string> vocab;
  for (const Doc& d : train) {
    class_set.insert(d.label);
    vocab.insert(d.tokens.begin(), d.tokens.end());
  }
  const std::vector<std::string> classes(class_set.begin(), class_set.end());
  const u128 n = vocab.size();

  std::vector<Rat> scores;
  for (const std::string& c : classes) {
    u128 docs_c = 0;
    u128 total_c = 0;  // in-vocabulary token occurrences in class c
    std::map<std::string, u128> counts;
    for (const Doc& d : train) {
      if (d.label != c) continue;
      ++docs_c;
      for (const std::string& t : d.tokens) {
        ++counts[t];
        ++total_c;
      }
    }
    Rat score{docs_c, static_cast<u128>(train.size())};
    const u128 denom = total_c + alpha * n;
    for (const std::string& t : query) {
      const auto it = counts.find(t);
      const u128 seen = it == counts.end() ? 0 : it->second;
      // unseen-in-vocabulary and out-of-vocabulary tokens both take the
      // smoothed floor alpha/denom
      score = score.times(Rat{seen + alpha, denom});
    }
    scores.push_back(score);
  }

  Rat total{0, 1};
  for (const Rat& s : scores) total = total.plus(s);

  Result result;
  result.classes = classes;
  std::size_t best = 0;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    result.posteriors.push_back(scores[k].value() / total.value());
    if (scores[best].less(scores[k])) best = k;
  }
  result.prediction = classes[best];
  return result;
}

}  // namespace nboracle
