#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Text feature pipeline: tokenizer, lexicon POS tagger, bag-of-words
// vectorizer and sentiment discretization.

namespace revmine {

class Corpus;

// ---------------------------------------------------------------------------
// Tokenization

// ASCII-only lowercasing; non-ASCII bytes pass through untouched.
std::string lower_ascii(std::string_view s);

// Splits text into maximal runs of word characters, lowercased (ASCII only).
// Word characters are ASCII letters/digits plus non-ASCII codepoints outside
// the common punctuation/symbol blocks. Apostrophes (' and U+2019, the
// latter normalized to ') are kept only between two word characters, so
// "don't" survives while quoting marks split. Invalid UTF-8 bytes act as
// separators. Pure and deterministic.
std::vector<std::string> tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Part-of-speech tagging

enum class PosTag : std::uint8_t { Noun = 0, Verb, Adjective, Adverb, Other };

inline constexpr std::size_t kPosTagCount = 5;

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);
constexpr std::array<PosTag, kPosTagCount> all_pos_tags() {
  return {PosTag::Noun, PosTag::Verb, PosTag::Adjective, PosTag::Adverb,
          PosTag::Other};
}

struct SuffixRule {
  std::string suffix;
  PosTag tag;
};

// Word-list tagger: exact match first, then the suffix rules in declared
// order, then the default tag (Noun). Entirely table-driven so tag output
// is auditable and reproducible.
class Lexicon {
 public:
  Lexicon() = default;

  void add_word(std::string word, PosTag tag);
  void add_suffix_rule(std::string suffix, PosTag tag);

  PosTag tag_of(std::string_view token) const;

  std::size_t word_count() const { return words_.size(); }
  std::size_t suffix_rule_count() const { return suffix_rules_.size(); }
  PosTag default_tag() const { return default_tag_; }

  // File format: `word<TAB>TAG` lines; a line `#suffix` opens the suffix
  // section where `suffix<TAB>TAG` lines apply in file order. Other lines
  // starting with '#' and blank lines are ignored.
  static Lexicon from_stream(std::istream& in, std::string_view name = "");
  static Lexicon from_file(const std::string& path);

 private:
  std::unordered_map<std::string, PosTag> words_;
  std::vector<SuffixRule> suffix_rules_;
  PosTag default_tag_ = PosTag::Noun;
};

// Word list and suffix rules compiled into the library; used whenever no
// lexicon file is supplied.
const Lexicon& bundled_lexicon();

struct TaggedToken {
  std::string token;
  PosTag tag;
};

// Length- and order-preserving.
std::vector<TaggedToken> tag_pos(std::span<const std::string> tokens,
                                 const Lexicon& lexicon);

struct PosProfile {
  std::array<std::size_t, kPosTagCount> counts{};
  std::size_t token_total = 0;

  std::size_t count(PosTag tag) const {
    return counts[static_cast<std::size_t>(tag)];
  }
  PosProfile& operator+=(const PosProfile& other);
  bool operator==(const PosProfile&) const = default;
};

PosProfile pos_profile(std::span<const TaggedToken> tagged);

// Most frequent tag; ties resolve to the earlier enum value.
PosTag dominant_tag(const PosProfile& profile);

// ---------------------------------------------------------------------------
// Vocabulary and count vectors

class Vocabulary {
 public:
  Vocabulary() = default;

  // `tokens` must be unique; they are stored sorted so indices are stable.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> lookup(std::string_view token) const;

  // Content fingerprint used to pair saved models with their vocabulary.
  std::string hash() const;

  void save(std::ostream& out) const;  // one token per line
  static Vocabulary load(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Tokens occurring at least `min_frequency` times, lexicographic order.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                            std::size_t min_frequency = 1);
Vocabulary build_vocabulary(const Corpus& corpus,
                            std::size_t min_frequency = 1);

struct FeatureVector {
  std::map<std::size_t, std::size_t> token_counts;  // vocab index -> count
  std::size_t oov_count = 0;  // out-of-vocabulary tokens, never dropped
  PosProfile pos_profile;
  std::size_t length = 0;  // total tokens, in-vocabulary + OOV
};

// Fills token_counts/oov_count/length; mass is conserved:
// sum(token_counts) + oov_count == tokens.size().
FeatureVector vectorize(std::span<const std::string> tokens,
                        const Vocabulary& vocab);

// ---------------------------------------------------------------------------
// Sentiment discretization

enum class SentimentClass : std::uint8_t { Negative = 0, Neutral, Positive };

std::string_view to_string(SentimentClass c);
std::optional<SentimentClass> parse_sentiment_class(std::string_view name);

inline constexpr double kDefaultSentimentEpsilon = 0.05;

// score must lie in [-1, 1]; the band [-epsilon, +epsilon] is Neutral
// (closed at both boundaries).
SentimentClass sentiment_class(double score,
                               double epsilon = kDefaultSentimentEpsilon);

}  // namespace revmine
