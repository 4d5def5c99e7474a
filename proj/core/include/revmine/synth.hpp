#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "revmine/corpus.hpp"

// Synthetic corpus generation from a declared class/token model. Stands in
// for the original course data, which is not distributable; ground-truth
// class labels are recorded on every comment so classifier recovery can be
// measured exactly.

namespace revmine {

struct GenSpec {
  std::vector<std::string> class_labels;
  std::vector<double> class_priors;      // sums to 1 (1e-9 tolerance)
  std::vector<std::string> vocabulary;   // shared across classes
  // token_distributions[k][i] = P(vocabulary[i] | class k); rows sum to 1.
  std::vector<std::vector<double>> token_distributions;

  // Exactly one of: fixed per-class counts, or a total with classes drawn
  // from class_priors.
  std::vector<std::size_t> comments_per_class;
  std::size_t total_comments = 0;

  double mean_comment_length = 8.0;  // Poisson mean, lengths clamped to >= 1
  std::size_t comments_per_review = 1;
  std::map<int, double> year_weights;  // empty means all mass on 2022
  std::pair<int, int> score_range{1, 5};
};

// Throws ConfigError when the spec is degenerate or inconsistent.
void check(const GenSpec& spec);

GenSpec load_genspec(std::istream& in);
void save_genspec(const GenSpec& spec, std::ostream& out);

// Deterministic: equal (spec, seed) give equal corpora on every platform.
Corpus synthesize(const GenSpec& spec, std::uint64_t seed);

}  // namespace revmine
