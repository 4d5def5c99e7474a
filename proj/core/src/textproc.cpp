#include "revmine/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "revmine/corpus.hpp"
#include "revmine/error.hpp"
#include "revmine/rng.hpp"

namespace revmine {

namespace {

struct Decoded {
  char32_t cp = 0;
  std::size_t length = 0;  // 0 marks an invalid sequence
};

Decoded decode_utf8(std::string_view s, std::size_t pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(s[i]);
  };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  auto cont = [&](std::size_t i) {
    return i < s.size() && (byte(i) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0) {
    if (!cont(pos + 1)) return {};
    const char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(pos + 1) & 0x3Fu);
    if (cp < 0x80) return {};  // overlong
    return {cp, 2};
  }
  if ((b0 & 0xF0) == 0xE0) {
    if (!cont(pos + 1) || !cont(pos + 2)) return {};
    const char32_t cp = ((b0 & 0x0Fu) << 12) | ((byte(pos + 1) & 0x3Fu) << 6) |
                        (byte(pos + 2) & 0x3Fu);
    if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return {};
    return {cp, 3};
  }
  if ((b0 & 0xF8) == 0xF0) {
    if (!cont(pos + 1) || !cont(pos + 2) || !cont(pos + 3)) return {};
    const char32_t cp = ((b0 & 0x07u) << 18) | ((byte(pos + 1) & 0x3Fu) << 12) |
                        ((byte(pos + 2) & 0x3Fu) << 6) | (byte(pos + 3) & 0x3Fu);
    if (cp < 0x10000 || cp > 0x10FFFF) return {};
    return {cp, 4};
  }
  return {};
}

bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  // Non-ASCII letters count as word characters; the common punctuation and
  // symbol blocks do not.
  if (cp <= 0xBF) return false;  // C1 controls and Latin-1 punctuation
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF01 && cp <= 0xFF20) return false;
  if (cp >= 0xFFF0) return false;
  return true;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t to_lower_ascii(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
}

}  // namespace

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const Decoded d = decode_utf8(text, pos);
    if (d.length == 0) {  // invalid byte separates
      flush();
      ++pos;
      continue;
    }
    char32_t cp = d.cp;
    if (cp == 0x2019) cp = '\'';  // curly apostrophe
    if (is_word_codepoint(cp)) {
      append_utf8(current, to_lower_ascii(cp));
    } else if (cp == '\'' && !current.empty()) {
      // Apostrophes survive only between word characters.
      const std::size_t next = pos + d.length;
      const Decoded nd = next < text.size() ? decode_utf8(text, next)
                                            : Decoded{};
      char32_t ncp = nd.length ? nd.cp : 0;
      if (ncp == 0x2019) ncp = '\'';
      if (nd.length != 0 && is_word_codepoint(ncp)) {
        current.push_back('\'');
      } else {
        flush();
      }
    } else {
      flush();
    }
    pos += d.length;
  }
  flush();
  return tokens;
}

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "noun";
    case PosTag::Verb: return "verb";
    case PosTag::Adjective: return "adjective";
    case PosTag::Adverb: return "adverb";
    case PosTag::Other: return "other";
  }
  return "other";
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "noun") return PosTag::Noun;
  if (n == "verb") return PosTag::Verb;
  if (n == "adjective" || n == "adj") return PosTag::Adjective;
  if (n == "adverb" || n == "adv") return PosTag::Adverb;
  if (n == "other") return PosTag::Other;
  return std::nullopt;
}

void Lexicon::add_word(std::string word, PosTag tag) {
  words_[lower_ascii(word)] = tag;
}

void Lexicon::add_suffix_rule(std::string suffix, PosTag tag) {
  suffix_rules_.push_back({lower_ascii(suffix), tag});
}

PosTag Lexicon::tag_of(std::string_view token) const {
  const std::string key = lower_ascii(token);
  if (const auto it = words_.find(key); it != words_.end()) {
    return it->second;
  }
  for (const SuffixRule& rule : suffix_rules_) {
    if (key.size() > rule.suffix.size() && key.ends_with(rule.suffix)) {
      return rule.tag;
    }
  }
  return default_tag_;
}

Lexicon Lexicon::from_stream(std::istream& in, std::string_view name) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  bool suffix_section = false;
  const std::string where = name.empty() ? "lexicon" : std::string(name);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t");
    std::string_view entry(line.data() + begin, end - begin + 1);
    if (entry.front() == '#') {
      if (entry == "#suffix") suffix_section = true;
      continue;
    }
    const auto tab = entry.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(where + ": expected word<TAB>TAG", line_no, "tag");
    }
    std::string_view word = entry.substr(0, tab);
    std::string_view tag_name = entry.substr(tab + 1);
    while (!tag_name.empty() && (tag_name.front() == ' ' || tag_name.front() == '\t')) {
      tag_name.remove_prefix(1);
    }
    if (word.empty()) {
      throw ParseError(where + ": empty word", line_no, "word");
    }
    const auto tag = parse_pos_tag(tag_name);
    if (!tag) {
      throw ParseError(where + ": unknown tag '" + std::string(tag_name) + "'",
                       line_no, "tag");
    }
    if (suffix_section) {
      lex.add_suffix_rule(std::string(word), *tag);
    } else {
      lex.add_word(std::string(word), *tag);
    }
  }
  return lex;
}

Lexicon Lexicon::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open lexicon file: " + path);
  }
  return from_stream(in, path);
}

std::vector<TaggedToken> tag_pos(std::span<const std::string> tokens,
                                 const Lexicon& lexicon) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    out.push_back({token, lexicon.tag_of(token)});
  }
  return out;
}

PosProfile& PosProfile::operator+=(const PosProfile& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  token_total += other.token_total;
  return *this;
}

PosProfile pos_profile(std::span<const TaggedToken> tagged) {
  PosProfile profile;
  for (const TaggedToken& t : tagged) {
    ++profile.counts[static_cast<std::size_t>(t.tag)];
    ++profile.token_total;
  }
  return profile;
}

PosTag dominant_tag(const PosProfile& profile) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < profile.counts.size(); ++i) {
    if (profile.counts[i] > profile.counts[best]) best = i;
  }
  return static_cast<PosTag>(best);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  if (std::adjacent_find(tokens.begin(), tokens.end()) != tokens.end()) {
    throw std::invalid_argument("vocabulary tokens must be unique");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index_.reserve(v.tokens_.size());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.index_.emplace(v.tokens_[i], i);
  }
  return v;
}

std::optional<std::size_t> Vocabulary::lookup(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::hash() const {
  std::uint64_t h = rng::kFnvOffset;
  for (const std::string& t : tokens_) {
    h = rng::fnv1a(t, h);
    h = rng::fnv1a("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void Vocabulary::save(std::ostream& out) const {
  for (const std::string& t : tokens_) {
    out << t << '\n';
  }
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

namespace {

Vocabulary vocabulary_from_counts(
    const std::map<std::string, std::size_t>& counts,
    std::size_t min_frequency) {
  std::vector<std::string> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_frequency) kept.push_back(token);
  }
  return Vocabulary::from_tokens(std::move(kept));
}

}  // namespace

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                            std::size_t min_frequency) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : docs) {
    for (const std::string& token : doc) ++counts[token];
  }
  return vocabulary_from_counts(counts, min_frequency);
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_frequency) {
  std::map<std::string, std::size_t> counts;
  for (const Review& review : corpus.reviews) {
    for (const Comment& comment : review.comments) {
      for (const std::string& token : tokenize(comment.text)) {
        ++counts[token];
      }
    }
  }
  return vocabulary_from_counts(counts, min_frequency);
}

FeatureVector vectorize(std::span<const std::string> tokens,
                        const Vocabulary& vocab) {
  FeatureVector fv;
  fv.length = tokens.size();
  for (const std::string& token : tokens) {
    if (const auto idx = vocab.lookup(token)) {
      ++fv.token_counts[*idx];
    } else {
      ++fv.oov_count;
    }
  }
  return fv;
}

std::string_view to_string(SentimentClass c) {
  switch (c) {
    case SentimentClass::Negative: return "negative";
    case SentimentClass::Neutral: return "neutral";
    case SentimentClass::Positive: return "positive";
  }
  return "neutral";
}

std::optional<SentimentClass> parse_sentiment_class(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "negative") return SentimentClass::Negative;
  if (n == "neutral") return SentimentClass::Neutral;
  if (n == "positive") return SentimentClass::Positive;
  return std::nullopt;
}

SentimentClass sentiment_class(double score, double epsilon) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw std::out_of_range("sentiment score outside [-1, 1]");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("sentiment epsilon must be >= 0");
  }
  if (score < -epsilon) return SentimentClass::Negative;
  if (score > epsilon) return SentimentClass::Positive;
  return SentimentClass::Neutral;
}

}  // namespace revmine
