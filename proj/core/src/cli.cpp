#include "revmine/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "revmine/bayes.hpp"
#include "revmine/csv.hpp"
#include "revmine/error.hpp"
#include "revmine/synth.hpp"

namespace revmine::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Value parsing shared by the config file and the flag layer. `line` is 0
// when the value came from a flag.

std::string trimmed(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string_view::npos ? value.size() : comma;
    std::string item = trimmed(value.substr(start, end - start));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            std::size_t line) {
  throw ConfigError("invalid value '" + value + "' for '" + key + "'", line);
}

double parse_double_value(const std::string& key, const std::string& value,
                          std::size_t line) {
  double out{};
  const char* const end = value.data() + value.size();
  const auto [p, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || p != end) bad_value(key, value, line);
  return out;
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& value,
                              std::size_t line) {
  std::uint64_t out{};
  const char* const end = value.data() + value.size();
  const auto [p, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || p != end) bad_value(key, value, line);
  return out;
}

std::size_t parse_size_value(const std::string& key, const std::string& value,
                             std::size_t line) {
  return static_cast<std::size_t>(parse_u64_value(key, value, line));
}

bool parse_bool_value(const std::string& key, const std::string& value,
                      std::size_t line) {
  const std::string v = lower_ascii(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, value, line);
}

std::pair<int, int> parse_range_value(const std::string& key,
                                      const std::string& value,
                                      std::size_t line) {
  auto sep = value.find(',');
  if (sep == std::string::npos) sep = value.find(':');
  if (sep == std::string::npos) bad_value(key, value, line);
  int lo{};
  int hi{};
  const std::string a = trimmed(value.substr(0, sep));
  const std::string b = trimmed(value.substr(sep + 1));
  const auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), lo);
  const auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), hi);
  if (ea != std::errc() || pa != a.data() + a.size() || eb != std::errc() ||
      pb != b.data() + b.size() || lo > hi) {
    bad_value(key, value, line);
  }
  return {lo, hi};
}

Format parse_format_value(const std::string& value, std::size_t line) {
  if (const auto f = parse_format(value)) return *f;
  throw ConfigError("unknown format '" + value + "'", line);
}

Task parse_task_value(const std::string& value, std::size_t line) {
  if (const auto t = parse_task(value)) return *t;
  throw ConfigError("unknown task '" + value + "'", line);
}

FeatureKind parse_feature_kind_value(const std::string& value,
                                     std::size_t line) {
  if (const auto k = parse_feature_kind(value)) return *k;
  throw ConfigError("unknown feature kind '" + value + "'", line);
}

std::vector<ReportFormat> parse_report_formats_value(
    const std::vector<std::string>& values, std::size_t line) {
  std::vector<ReportFormat> formats;
  for (const std::string& value : values) {
    const auto f = parse_report_format(value);
    if (!f) throw ConfigError("unknown report format '" + value + "'", line);
    if (std::find(formats.begin(), formats.end(), *f) == formats.end()) {
      formats.push_back(*f);
    }
  }
  return formats;
}

bool set_schema_field(Schema& schema, std::string_view field,
                      std::string name) {
  if (field == "review_id") schema.review_id = std::move(name);
  else if (field == "reviewer") schema.reviewer = std::move(name);
  else if (field == "reviewee") schema.reviewee = std::move(name);
  else if (field == "year") schema.year = std::move(name);
  else if (field == "semester") schema.semester = std::move(name);
  else if (field == "comment_id") schema.comment_id = std::move(name);
  else if (field == "text") schema.text = std::move(name);
  else if (field == "sentiment") schema.sentiment = std::move(name);
  else if (field == "label") schema.label = std::move(name);
  else if (field == "rubric_category") schema.rubric_category = std::move(name);
  else if (field == "rubric_score") schema.rubric_score = std::move(name);
  else return false;
  return true;
}

void apply_schema_entry(Schema& schema, const std::string& entry,
                        std::size_t line) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("schema entry '" + entry + "' is not field=name", line);
  }
  const std::string field = trimmed(entry.substr(0, eq));
  std::string name = trimmed(entry.substr(eq + 1));
  if (name.empty()) {
    throw ConfigError("schema entry '" + entry + "' has an empty name", line);
  }
  if (!set_schema_field(schema, field, std::move(name))) {
    throw ConfigError("unknown schema field '" + field + "'", line);
  }
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value, std::size_t line) {
  if (key == "command") return;  // echoed configs carry it; harmless here
  if (key == "input") {
    for (std::string& item : split_list(value)) {
      cfg.inputs.push_back(std::move(item));
    }
  } else if (key == "format") {
    cfg.format = parse_format_value(value, line);
  } else if (key == "task") {
    cfg.task = parse_task_value(value, line);
  } else if (key == "alpha") {
    cfg.alpha = parse_double_value(key, value, line);
  } else if (key == "feature_kind") {
    cfg.feature_kind = parse_feature_kind_value(value, line);
  } else if (key == "min_frequency") {
    cfg.min_frequency = parse_size_value(key, value, line);
  } else if (key == "sentiment_epsilon") {
    cfg.sentiment_epsilon = parse_double_value(key, value, line);
  } else if (key == "positive_class") {
    cfg.positive_class = value;
  } else if (key == "train_fraction") {
    cfg.train_fraction = parse_double_value(key, value, line);
  } else if (key == "folds") {
    cfg.folds = parse_size_value(key, value, line);
  } else if (key == "stratified") {
    cfg.stratified = parse_bool_value(key, value, line);
  } else if (key == "seed") {
    cfg.seed = parse_u64_value(key, value, line);
  } else if (key == "lexicon") {
    cfg.lexicon = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "report_formats") {
    cfg.report_formats = parse_report_formats_value(split_list(value), line);
  } else if (key == "include_length") {
    cfg.include_length = parse_bool_value(key, value, line);
  } else if (key == "model") {
    cfg.model = value;
  } else if (key == "vocabulary") {
    cfg.vocabulary = value;
  } else if (key == "genspec") {
    cfg.genspec = value;
  } else if (key == "text") {
    cfg.text = value;
  } else if (key == "salt") {
    cfg.salt = value;
  } else if (key == "score_range") {
    cfg.score_range = parse_range_value(key, value, line);
  } else if (key.starts_with("schema.")) {
    const std::string field = key.substr(7);
    std::string name = value;
    if (name.empty()) {
      throw ConfigError("schema entry '" + key + "' has an empty name", line);
    }
    if (!set_schema_field(cfg.schema, field, std::move(name))) {
      throw ConfigError("unknown schema field '" + field + "'", line);
    }
  } else {
    throw ConfigError("unknown key '" + key + "'", line);
  }
}

// ---------------------------------------------------------------------------
// Flag overrides collected by the parser, applied over the config file.

struct Overrides {
  std::optional<std::string> config_path;
  std::vector<std::string> positional_inputs;
  std::vector<std::string> flag_inputs;
  std::optional<std::string> format;
  std::optional<std::string> task;
  std::optional<double> alpha;
  std::optional<std::string> feature_kind;
  std::optional<std::size_t> min_frequency;
  std::optional<double> sentiment_epsilon;
  std::optional<std::string> positive_class;
  std::optional<double> train_fraction;
  std::optional<std::size_t> folds;
  std::optional<bool> stratified;
  bool include_length = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> lexicon;
  std::optional<std::string> out;
  std::vector<std::string> report_formats;
  std::vector<std::string> schema_entries;
  std::optional<std::string> score_range;
  std::optional<std::string> model;
  std::optional<std::string> vocabulary;
  std::optional<std::string> genspec;
  std::optional<std::string> text;
  std::optional<std::string> salt;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
  std::vector<std::string> inputs = ov.positional_inputs;
  inputs.insert(inputs.end(), ov.flag_inputs.begin(), ov.flag_inputs.end());
  if (!inputs.empty()) cfg.inputs = std::move(inputs);
  if (ov.format) cfg.format = parse_format_value(*ov.format, 0);
  if (ov.task) cfg.task = parse_task_value(*ov.task, 0);
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.feature_kind) {
    cfg.feature_kind = parse_feature_kind_value(*ov.feature_kind, 0);
  }
  if (ov.min_frequency) cfg.min_frequency = *ov.min_frequency;
  if (ov.sentiment_epsilon) cfg.sentiment_epsilon = *ov.sentiment_epsilon;
  if (ov.positive_class) cfg.positive_class = *ov.positive_class;
  if (ov.train_fraction) cfg.train_fraction = *ov.train_fraction;
  if (ov.folds) cfg.folds = *ov.folds;
  if (ov.stratified) cfg.stratified = *ov.stratified;
  if (ov.include_length) cfg.include_length = true;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.lexicon) cfg.lexicon = *ov.lexicon;
  if (ov.out) cfg.out = *ov.out;
  if (!ov.report_formats.empty()) {
    cfg.report_formats = parse_report_formats_value(ov.report_formats, 0);
  }
  for (const std::string& entry : ov.schema_entries) {
    apply_schema_entry(cfg.schema, entry, 0);
  }
  if (ov.score_range) {
    cfg.score_range = parse_range_value("score_range", *ov.score_range, 0);
  }
  if (ov.model) cfg.model = *ov.model;
  if (ov.vocabulary) cfg.vocabulary = *ov.vocabulary;
  if (ov.genspec) cfg.genspec = *ov.genspec;
  if (ov.text) cfg.text = *ov.text;
  if (ov.salt) cfg.salt = *ov.salt;
}

// ---------------------------------------------------------------------------
// Shared command plumbing

std::string_view kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::SelfReview: return "self_review";
    case ViolationKind::YearOutOfSpan: return "year_out_of_span";
    case ViolationKind::DuplicateRubricCategory:
      return "duplicate_rubric_category";
    case ViolationKind::ScoreOutOfRange: return "score_out_of_range";
    case ViolationKind::EmptyCommentText: return "empty_comment_text";
    case ViolationKind::SentimentOutOfRange: return "sentiment_out_of_range";
    case ViolationKind::DuplicateReviewId: return "duplicate_review_id";
    case ViolationKind::CommentReviewMismatch:
      return "comment_review_mismatch";
  }
  return "unknown";
}

std::string violation_summary(const ValidationReport& report) {
  std::string message = report.violations.front().message;
  if (report.violations.size() > 1) {
    message += " (and " + std::to_string(report.violations.size() - 1) +
               " more violations)";
  }
  return message;
}

Corpus load_corpus(const RunConfig& cfg, bool validate_corpus) {
  if (cfg.inputs.empty()) throw ConfigError("no input files given");
  IngestOptions options;
  options.score_range = cfg.score_range.value_or(std::pair<int, int>{1, 5});
  options.validate = false;
  Corpus merged;
  merged.score_range = options.score_range;
  bool any_reviews = false;
  for (const std::string& path : cfg.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file " + path);
    Corpus part;
    try {
      part = ingest(in, cfg.format, cfg.schema, options);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what(), e.line(), e.field());
    }
    if (!part.reviews.empty()) {
      if (!any_reviews) {
        merged.year_span = part.year_span;
        any_reviews = true;
      } else {
        merged.year_span.first =
            std::min(merged.year_span.first, part.year_span.first);
        merged.year_span.second =
            std::max(merged.year_span.second, part.year_span.second);
      }
    }
    std::move(part.reviews.begin(), part.reviews.end(),
              std::back_inserter(merged.reviews));
  }
  if (validate_corpus) {
    const ValidationReport report = validate(merged);
    if (!report.ok()) throw DataError(violation_summary(report));
  }
  return merged;
}

Lexicon resolve_lexicon(const RunConfig& cfg) {
  if (cfg.lexicon.empty()) return bundled_lexicon();
  return Lexicon::from_file(cfg.lexicon);
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  const std::filesystem::path out = cfg.out.empty() ? "." : cfg.out;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    throw ConfigError("cannot create " + out.string() + ": " + ec.message());
  }
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string join(const std::vector<std::string>& items,
                 std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += separator;
    out += items[i];
  }
  return out;
}

// The echo is itself a loadable config; `out` stays out of it so replaying
// into another directory produces identical bytes.
std::string effective_config_text(const RunConfig& cfg,
                                  std::string_view command) {
  std::map<std::string, std::string> kv;
  kv["command"] = std::string(command);
  if (!cfg.inputs.empty()) kv["input"] = join(cfg.inputs, ",");
  kv["format"] = std::string(to_string(cfg.format));
  kv["task"] = std::string(to_string(cfg.task));
  kv["alpha"] = csv::format_double(cfg.alpha);
  kv["feature_kind"] = std::string(to_string(cfg.feature_kind));
  kv["min_frequency"] = std::to_string(cfg.min_frequency);
  kv["sentiment_epsilon"] = csv::format_double(cfg.sentiment_epsilon);
  if (!cfg.positive_class.empty()) kv["positive_class"] = cfg.positive_class;
  kv["train_fraction"] = csv::format_double(cfg.train_fraction);
  kv["folds"] = std::to_string(cfg.folds);
  kv["stratified"] = cfg.stratified ? "true" : "false";
  if (cfg.seed) kv["seed"] = std::to_string(*cfg.seed);
  if (!cfg.lexicon.empty()) kv["lexicon"] = cfg.lexicon;
  {
    std::vector<std::string> names;
    for (const ReportFormat f : cfg.report_formats) {
      names.emplace_back(to_string(f));
    }
    kv["report_formats"] = join(names, ",");
  }
  if (cfg.include_length) kv["include_length"] = "true";
  if (!cfg.model.empty()) kv["model"] = cfg.model;
  if (!cfg.vocabulary.empty()) kv["vocabulary"] = cfg.vocabulary;
  if (!cfg.genspec.empty()) kv["genspec"] = cfg.genspec;
  if (!cfg.text.empty()) kv["text"] = cfg.text;
  if (!cfg.salt.empty()) kv["salt"] = cfg.salt;
  if (cfg.score_range) {
    kv["score_range"] = std::to_string(cfg.score_range->first) + "," +
                        std::to_string(cfg.score_range->second);
  }
  const Schema defaults;
  const auto schema_kv = [&](std::string_view field, const std::string& name,
                             const std::string& fallback) {
    if (name != fallback) kv["schema." + std::string(field)] = name;
  };
  schema_kv("review_id", cfg.schema.review_id, defaults.review_id);
  schema_kv("reviewer", cfg.schema.reviewer, defaults.reviewer);
  schema_kv("reviewee", cfg.schema.reviewee, defaults.reviewee);
  schema_kv("year", cfg.schema.year, defaults.year);
  schema_kv("semester", cfg.schema.semester, defaults.semester);
  schema_kv("comment_id", cfg.schema.comment_id, defaults.comment_id);
  schema_kv("text", cfg.schema.text, defaults.text);
  schema_kv("sentiment", cfg.schema.sentiment, defaults.sentiment);
  schema_kv("label", cfg.schema.label, defaults.label);
  schema_kv("rubric_category", cfg.schema.rubric_category,
            defaults.rubric_category);
  schema_kv("rubric_score", cfg.schema.rubric_score, defaults.rubric_score);
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += "=";
    out += value;
    out += "\n";
  }
  return out;
}

void echo_effective_config(const RunConfig& cfg, std::string_view command,
                           const std::filesystem::path& out_dir) {
  write_text_file(out_dir / "effective-config.txt",
                  effective_config_text(cfg, command));
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) {
    std::cerr << "revmine: warning: " << w << "\n";
  }
}

void require_seed(const RunConfig& cfg, std::string_view command) {
  if (!cfg.seed) {
    throw ConfigError(std::string(command) + " requires --seed");
  }
}

json opt_json(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

std::size_t comment_count(const Corpus& corpus) {
  std::size_t n = 0;
  for (const Review& review : corpus.reviews) n += review.comments.size();
  return n;
}

std::vector<std::string> instance_labels(
    std::span<const LabeledInstance> instances) {
  std::vector<std::string> labels;
  labels.reserve(instances.size());
  for (const LabeledInstance& instance : instances) {
    labels.push_back(instance.label);
  }
  return labels;
}

std::vector<std::string> sorted_unique(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

struct TrainedPipeline {
  Vocabulary vocabulary;
  NaiveBayesModel model;
};

// Vocabulary and model from the given training subset only.
TrainedPipeline train_pipeline(std::span<const LabeledInstance> instances,
                               std::span<const std::size_t> train_indices,
                               const RunConfig& cfg, const Lexicon& lexicon) {
  Vocabulary vocabulary;
  TrainConfig tc;
  tc.alpha = cfg.alpha;
  tc.feature_kind = cfg.feature_kind;
  if (cfg.feature_kind == FeatureKind::TokenCounts) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(train_indices.size());
    for (const std::size_t i : train_indices) {
      docs.push_back(instances[i].tokens);
    }
    vocabulary = build_vocabulary(docs, cfg.min_frequency);
    if (vocabulary.size() == 0) {
      throw DataError("vocabulary is empty at min_frequency " +
                      std::to_string(cfg.min_frequency));
    }
    tc.vocabulary_size = vocabulary.size();
    tc.vocabulary_hash = vocabulary.hash();
  } else {
    tc.vocabulary_size = kPosTagCount;
  }
  std::vector<FeatureVector> features;
  std::vector<std::string> labels;
  features.reserve(train_indices.size());
  labels.reserve(train_indices.size());
  for (const std::size_t i : train_indices) {
    features.push_back(instance_features(instances[i], vocabulary,
                                         cfg.feature_kind, lexicon));
    labels.push_back(instances[i].label);
  }
  tc.class_labels = sorted_unique(labels);
  return {std::move(vocabulary), NaiveBayesModel::train(features, labels, tc)};
}

void write_confusion_csv(const ConfusionMatrix& cm,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  cm.write_csv(out);
  if (!out) throw ConfigError("failed writing " + path.string());
}

json metrics_json(const MetricsReport& metrics) {
  json object;
  object["accuracy"] = metrics.accuracy;
  object["sensitivity"] = opt_json(metrics.sensitivity);
  object["specificity"] = opt_json(metrics.specificity);
  object["ppv"] = opt_json(metrics.ppv);
  object["npv"] = opt_json(metrics.npv);
  object["positive_class"] = metrics.positive_class;
  if (!metrics.per_fold_accuracies.empty()) {
    object["per_fold_accuracies"] = metrics.per_fold_accuracies;
    object["accuracy_mean"] = opt_json(metrics.accuracy_mean);
    object["accuracy_std"] = opt_json(metrics.accuracy_std);
  }
  return object;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_ingest(const RunConfig& cfg) {
  Corpus corpus = load_corpus(cfg, /*validate_corpus=*/false);
  const ValidationReport report = validate(corpus);
  if (!cfg.salt.empty()) corpus = anonymize(corpus, cfg.salt);
  const auto out_dir = ensure_out_dir(cfg);

  const char* corpus_name =
      cfg.format == Format::Csv ? "corpus.csv" : "corpus.jsonl";
  {
    std::ofstream out(out_dir / corpus_name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (out_dir / corpus_name).string());
    export_corpus(corpus, out, cfg.format, cfg.schema);
    if (!out) throw ConfigError("failed writing " + (out_dir / corpus_name).string());
  }

  json validation;
  validation["ok"] = report.ok();
  json violations = json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"kind", std::string(kind_name(v.kind))},
                          {"record", v.record_position},
                          {"record_id", v.record_id},
                          {"message", v.message}});
  }
  validation["violations"] = std::move(violations);
  write_text_file(out_dir / "validation.json", validation.dump(2) + "\n");
  echo_effective_config(cfg, "ingest", out_dir);

  json summary;
  summary["command"] = "ingest";
  summary["reviews"] = corpus.reviews.size();
  summary["comments"] = comment_count(corpus);
  summary["violations"] = report.violations.size();
  summary["anonymized"] = !cfg.salt.empty();
  std::cout << summary.dump() << "\n";
  if (!report.ok()) {
    std::cerr << "revmine: " << violation_summary(report) << "\n";
    return kExitData;
  }
  return kExitSuccess;
}

int cmd_stats(const RunConfig& cfg) {
  const Corpus corpus = load_corpus(cfg, true);
  const CorpusStats s = stats(corpus);
  const auto out_dir = ensure_out_dir(cfg);

  json object;
  object["reviews"] = s.total_reviews;
  object["comments"] = s.total_comments;
  object["words"] = s.total_words;
  object["mean_words_per_review"] = opt_json(s.mean_words_per_review);
  json words_by_year;
  for (const auto& [year, n] : s.words_by_year) {
    words_by_year[std::to_string(year)] = n;
  }
  object["words_by_year"] = std::move(words_by_year);
  json comments_by_year;
  for (const auto& [year, n] : s.comments_by_year) {
    comments_by_year[std::to_string(year)] = n;
  }
  object["comments_by_year"] = std::move(comments_by_year);
  object["year_span"] = {corpus.year_span.first, corpus.year_span.second};
  object["score_range"] = {corpus.score_range.first,
                           corpus.score_range.second};
  write_text_file(out_dir / "stats.json", object.dump(2) + "\n");
  echo_effective_config(cfg, "stats", out_dir);

  json summary;
  summary["command"] = "stats";
  summary["reviews"] = s.total_reviews;
  summary["comments"] = s.total_comments;
  summary["words"] = s.total_words;
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_train(const RunConfig& cfg) {
  const Corpus corpus = load_corpus(cfg, true);
  const Lexicon lexicon = resolve_lexicon(cfg);
  std::vector<std::string> warnings;
  const std::vector<LabeledInstance> instances = extract_instances(
      corpus, cfg.task, lexicon, cfg.sentiment_epsilon, &warnings);
  if (instances.empty()) {
    throw DataError("no labeled instances for task '" +
                    std::string(to_string(cfg.task)) + "'");
  }
  std::vector<std::size_t> all(instances.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const TrainedPipeline pipeline =
      train_pipeline(instances, all, cfg, lexicon);

  const auto out_dir = ensure_out_dir(cfg);
  {
    std::ofstream out(out_dir / "model.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (out_dir / "model.json").string());
    pipeline.model.save(out);
    if (!out) throw ConfigError("failed writing " + (out_dir / "model.json").string());
  }
  if (cfg.feature_kind == FeatureKind::TokenCounts) {
    std::ofstream out(out_dir / "vocabulary.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (out_dir / "vocabulary.txt").string());
    pipeline.vocabulary.save(out);
    if (!out) throw ConfigError("failed writing " + (out_dir / "vocabulary.txt").string());
  }
  echo_effective_config(cfg, "train", out_dir);
  print_warnings(warnings);

  json summary;
  summary["command"] = "train";
  summary["instances"] = instances.size();
  summary["classes"] = pipeline.model.class_labels();
  summary["vocabulary"] = pipeline.model.vocabulary_size();
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_predict(const RunConfig& cfg) {
  if (cfg.model.empty()) throw ConfigError("predict requires --model");
  if (!cfg.text.empty() && !cfg.inputs.empty()) {
    throw ConfigError("give either --text or input files, not both");
  }
  if (cfg.text.empty() && cfg.inputs.empty()) {
    throw ConfigError("predict needs input files or --text");
  }
  std::ifstream model_in(cfg.model, std::ios::binary);
  if (!model_in) throw ConfigError("cannot open model file " + cfg.model);
  const NaiveBayesModel model = NaiveBayesModel::load(model_in);
  const Lexicon lexicon = resolve_lexicon(cfg);
  Vocabulary vocabulary;
  if (model.feature_kind() == FeatureKind::TokenCounts) {
    if (cfg.vocabulary.empty()) {
      throw ConfigError("predict requires --vocab for token-count models");
    }
    std::ifstream vocab_in(cfg.vocabulary, std::ios::binary);
    if (!vocab_in) {
      throw ConfigError("cannot open vocabulary file " + cfg.vocabulary);
    }
    vocabulary = Vocabulary::load(vocab_in);
    if (!model.vocabulary_hash().empty() &&
        vocabulary.hash() != model.vocabulary_hash()) {
      throw DataError(
          "model was trained against a different vocabulary (hash mismatch)");
    }
  }
  const auto features_for = [&](const std::string& text) {
    LabeledInstance instance;
    instance.tokens = tokenize(text);
    return instance_features(instance, vocabulary, model.feature_kind(),
                             lexicon);
  };

  if (!cfg.text.empty()) {
    const FeatureVector features = features_for(cfg.text);
    const Posterior posterior = model.posteriors(features);
    json object;
    object["label"] = model.predict(features);
    json probabilities;
    for (std::size_t k = 0; k < model.class_count(); ++k) {
      probabilities[model.class_labels()[k]] = posterior.probabilities[k];
    }
    object["posteriors"] = std::move(probabilities);
    std::cout << object.dump() << "\n";
    return kExitSuccess;
  }

  const Corpus corpus = load_corpus(cfg, true);
  const auto out_dir = ensure_out_dir(cfg);
  std::ofstream out(out_dir / "predictions.csv", std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (out_dir / "predictions.csv").string());
  csv::write_row(out, std::vector<std::string>{"review_id", "comment_id",
                                               "label", "predicted",
                                               "confidence"});
  std::size_t n = 0;
  for (const Review& review : corpus.reviews) {
    for (const Comment& comment : review.comments) {
      const FeatureVector features = features_for(comment.text);
      const Posterior posterior = model.posteriors(features);
      std::size_t best = 0;
      for (std::size_t k = 1; k < posterior.probabilities.size(); ++k) {
        if (posterior.probabilities[k] > posterior.probabilities[best]) {
          best = k;
        }
      }
      csv::write_row(
          out, std::vector<std::string>{
                   review.id, comment.id, comment.label,
                   model.predict(features),
                   csv::format_double(posterior.probabilities[best])});
      ++n;
    }
  }
  if (!out) throw ConfigError("failed writing " + (out_dir / "predictions.csv").string());
  out.close();
  echo_effective_config(cfg, "predict", out_dir);

  json summary;
  summary["command"] = "predict";
  summary["comments"] = n;
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_evaluate(const RunConfig& cfg) {
  require_seed(cfg, "evaluate");
  const Corpus corpus = load_corpus(cfg, true);
  const Lexicon lexicon = resolve_lexicon(cfg);
  std::vector<std::string> warnings;
  const std::vector<LabeledInstance> instances = extract_instances(
      corpus, cfg.task, lexicon, cfg.sentiment_epsilon, &warnings);
  if (instances.size() < 2) {
    throw DataError("need at least 2 labeled instances for task '" +
                    std::string(to_string(cfg.task)) + "'");
  }
  const std::vector<std::string> labels = instance_labels(instances);

  SplitSpec split_spec;
  split_spec.train_fraction = cfg.train_fraction;
  split_spec.seed = *cfg.seed;
  split_spec.stratified = cfg.stratified;
  SplitResult split = holdout_split(instances.size(), split_spec,
                                    cfg.stratified ? labels
                                                   : std::span<const std::string>{});
  warnings.insert(warnings.end(), split.warnings.begin(),
                  split.warnings.end());
  if (split.test.empty()) throw DataError("holdout test set is empty");

  const TrainedPipeline pipeline =
      train_pipeline(instances, split.train, cfg, lexicon);
  std::vector<std::string> actual;
  std::vector<std::string> predicted;
  actual.reserve(split.test.size());
  predicted.reserve(split.test.size());
  for (const std::size_t i : split.test) {
    actual.push_back(instances[i].label);
    predicted.push_back(pipeline.model.predict(instance_features(
        instances[i], pipeline.vocabulary, cfg.feature_kind, lexicon)));
  }
  const ConfusionMatrix cm =
      confusion(actual, predicted, sorted_unique(labels));

  MetricsReport metrics;
  if (cm.class_count() < 2) {
    warnings.emplace_back(
        "single-class evaluation; predictive rates are undefined");
    metrics = macro_metrics(cm);
  } else if (!cfg.positive_class.empty() && cm.index_of(cfg.positive_class)) {
    metrics = binary_metrics(cm, cfg.positive_class);
  } else {
    if (!cfg.positive_class.empty()) {
      warnings.push_back("positive class '" + cfg.positive_class +
                         "' not among the labels; macro rates reported");
    }
    metrics = macro_metrics(cm);
  }

  const auto out_dir = ensure_out_dir(cfg);
  json object = metrics_json(metrics);
  object["task"] = std::string(to_string(cfg.task));
  object["train_size"] = split.train.size();
  object["test_size"] = split.test.size();
  object["classes"] = cm.class_labels();
  object["warnings"] = warnings;
  write_text_file(out_dir / "metrics.json", object.dump(2) + "\n");
  write_confusion_csv(cm, out_dir / "confusion.csv");
  echo_effective_config(cfg, "evaluate", out_dir);
  print_warnings(warnings);

  json summary;
  summary["command"] = "evaluate";
  summary["accuracy"] = metrics.accuracy;
  summary["train_size"] = split.train.size();
  summary["test_size"] = split.test.size();
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_crossval(const RunConfig& cfg) {
  require_seed(cfg, "crossval");
  const Corpus corpus = load_corpus(cfg, true);
  const Lexicon lexicon = resolve_lexicon(cfg);
  std::vector<std::string> warnings;
  const std::vector<LabeledInstance> instances = extract_instances(
      corpus, cfg.task, lexicon, cfg.sentiment_epsilon, &warnings);
  if (instances.empty()) {
    throw DataError("no labeled instances for task '" +
                    std::string(to_string(cfg.task)) + "'");
  }
  const std::vector<std::string> labels = instance_labels(instances);
  const FoldPlan plan =
      kfold_plan(instances.size(), cfg.folds, *cfg.seed, cfg.stratified,
                 cfg.stratified ? labels : std::span<const std::string>{});

  PipelineConfig pc;
  pc.task = cfg.task;
  pc.feature_kind = cfg.feature_kind;
  pc.alpha = cfg.alpha;
  pc.min_frequency = cfg.min_frequency;
  pc.sentiment_epsilon = cfg.sentiment_epsilon;
  pc.positive_class = cfg.positive_class;
  const CrossValidationResult result =
      cross_validate(instances, pc, plan, lexicon);
  warnings.insert(warnings.end(), result.warnings.begin(),
                  result.warnings.end());

  const auto out_dir = ensure_out_dir(cfg);
  json object = metrics_json(result.metrics);
  object["task"] = std::string(to_string(cfg.task));
  object["folds"] = cfg.folds;
  object["instances"] = instances.size();
  object["classes"] = result.aggregate.class_labels();
  object["warnings"] = warnings;
  write_text_file(out_dir / "metrics.json", object.dump(2) + "\n");
  write_confusion_csv(result.aggregate, out_dir / "confusion.csv");
  echo_effective_config(cfg, "crossval", out_dir);
  print_warnings(warnings);

  json summary;
  summary["command"] = "crossval";
  summary["accuracy"] = result.metrics.accuracy;
  summary["folds"] = cfg.folds;
  summary["instances"] = instances.size();
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_report(const RunConfig& cfg) {
  const Corpus corpus = load_corpus(cfg, true);
  const Lexicon lexicon = resolve_lexicon(cfg);
  ReportBundle bundle = build_report(corpus, lexicon, cfg.include_length);

  if (cfg.seed) {
    const std::vector<LabeledInstance> instances = extract_instances(
        corpus, Task::Rubric, lexicon, cfg.sentiment_epsilon, nullptr);
    if (instances.size() >= std::max<std::size_t>(cfg.folds, 2)) {
      const std::vector<std::string> labels = instance_labels(instances);
      const FoldPlan plan =
          kfold_plan(instances.size(), cfg.folds, *cfg.seed, cfg.stratified,
                     cfg.stratified ? labels
                                    : std::span<const std::string>{});
      PipelineConfig pc;
      pc.task = Task::Rubric;
      pc.feature_kind = cfg.feature_kind;
      pc.alpha = cfg.alpha;
      pc.min_frequency = cfg.min_frequency;
      pc.sentiment_epsilon = cfg.sentiment_epsilon;
      bundle.rubric = rubric_report(corpus, pc, plan, lexicon);
    } else {
      bundle.warnings.push_back("too few rubric instances for " +
                                std::to_string(cfg.folds) +
                                "-fold scoring; rubric section skipped");
    }
  } else {
    bundle.warnings.emplace_back("no seed given; rubric section skipped");
  }

  const auto out_dir = ensure_out_dir(cfg);
  std::size_t files = 0;
  for (const ReportFormat format : cfg.report_formats) {
    files += emit_report(bundle, format, out_dir).size();
  }
  echo_effective_config(cfg, "report", out_dir);
  print_warnings(bundle.warnings);
  if (bundle.rubric) print_warnings(bundle.rubric->warnings);

  json summary;
  summary["command"] = "report";
  summary["reviews"] = bundle.corpus_stats.total_reviews;
  summary["comments"] = bundle.corpus_stats.total_comments;
  summary["files"] = files;
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int cmd_synth(const RunConfig& cfg) {
  if (cfg.genspec.empty()) throw ConfigError("synth requires --genspec");
  require_seed(cfg, "synth");
  std::ifstream in(cfg.genspec, std::ios::binary);
  if (!in) throw ConfigError("cannot open generator spec " + cfg.genspec);
  const GenSpec spec = load_genspec(in);
  const Corpus corpus = synthesize(spec, *cfg.seed);

  const auto out_dir = ensure_out_dir(cfg);
  const char* corpus_name =
      cfg.format == Format::Csv ? "corpus.csv" : "corpus.jsonl";
  {
    std::ofstream out(out_dir / corpus_name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (out_dir / corpus_name).string());
    export_corpus(corpus, out, cfg.format, cfg.schema);
    if (!out) throw ConfigError("failed writing " + (out_dir / corpus_name).string());
  }
  echo_effective_config(cfg, "synth", out_dir);

  json summary;
  summary["command"] = "synth";
  summary["reviews"] = corpus.reviews.size();
  summary["comments"] = comment_count(corpus);
  std::cout << summary.dump() << "\n";
  return kExitSuccess;
}

int dispatch(const std::string& command, const RunConfig& cfg) {
  if (command == "ingest") return cmd_ingest(cfg);
  if (command == "stats") return cmd_stats(cfg);
  if (command == "train") return cmd_train(cfg);
  if (command == "predict") return cmd_predict(cfg);
  if (command == "evaluate") return cmd_evaluate(cfg);
  if (command == "crossval") return cmd_crossval(cfg);
  if (command == "report") return cmd_report(cfg);
  if (command == "synth") return cmd_synth(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

std::string located(const Error& e, std::size_t line,
                    const std::string& field = {}) {
  std::string message = e.what();
  if (line > 0) {
    message += " (line " + std::to_string(line);
    if (!field.empty()) message += ", field '" + field + "'";
    message += ")";
  } else if (!field.empty()) {
    message += " (field '" + field + "')";
  }
  return message;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trimmed(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value", line_no);
    }
    const std::string key = trimmed(stripped.substr(0, eq));
    const std::string value = trimmed(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    apply_config_entry(cfg, key, value, line_no);
  }
  return cfg;
}

int run(const std::vector<std::string>& argv) {
  try {
    CLI::App app{"peer-review comment analytics"};
    app.set_version_flag("--version", "revmine 0.1.0");
    app.require_subcommand(1);
    Overrides ov;

    const auto add_common = [&](CLI::App* sub) {
      sub->add_option("--config", ov.config_path,
                     "key=value configuration file; flags override it");
      sub->add_option("--seed", ov.seed,
                     "random seed; every randomized step derives from it");
      sub->add_option("--out", ov.out, "output directory");
      sub->add_option("--format", ov.format, "data file format: csv or jsonl");
      sub->add_option("--lexicon", ov.lexicon,
                     "tagger lexicon file; defaults to the bundled one");
      sub->add_option("--schema", ov.schema_entries,
                     "rename a data column, as field=name")
          ->type_name("FIELD=NAME");
    };
    const auto add_inputs = [&](CLI::App* sub) {
      sub->add_option("inputs", ov.positional_inputs, "input data files");
      sub->add_option("-i,--input", ov.flag_inputs, "input data file");
      sub->add_option("--score-range", ov.score_range,
                     "valid rubric score range, as lo,hi");
    };
    const auto add_pipeline = [&](CLI::App* sub, bool with_task) {
      if (with_task) {
        sub->add_option("--task", ov.task, "pos, rubric, or sentiment");
      }
      sub->add_option("--alpha", ov.alpha, "smoothing pseudo-count");
      sub->add_option("--feature-kind", ov.feature_kind,
                     "token_counts or pos_profile");
      sub->add_option("--min-frequency", ov.min_frequency,
                     "vocabulary frequency floor");
      sub->add_option("--sentiment-epsilon", ov.sentiment_epsilon,
                     "half-width of the neutral sentiment band");
    };
    const auto add_stratified = [&](CLI::App* sub) {
      auto* on = sub->add_flag_callback(
          "--stratified", [&ov] { ov.stratified = true; },
          "class-balanced splits (default)");
      auto* off = sub->add_flag_callback(
          "--no-stratified", [&ov] { ov.stratified = false; },
          "plain random splits");
      on->excludes(off);
    };

    CLI::App* ingest_cmd = app.add_subcommand(
        "ingest", "parse, validate and normalize a corpus");
    add_common(ingest_cmd);
    add_inputs(ingest_cmd);
    ingest_cmd->add_option("--salt", ov.salt,
                           "anonymize reviewer/reviewee ids with this salt");

    CLI::App* stats_cmd =
        app.add_subcommand("stats", "corpus summary statistics");
    add_common(stats_cmd);
    add_inputs(stats_cmd);

    CLI::App* train_cmd = app.add_subcommand(
        "train", "train a classifier on every labeled comment");
    add_common(train_cmd);
    add_inputs(train_cmd);
    add_pipeline(train_cmd, true);

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "score comments with a trained model");
    add_common(predict_cmd);
    add_inputs(predict_cmd);
    predict_cmd->add_option("--model", ov.model, "trained model file");
    predict_cmd->add_option("--vocab", ov.vocabulary,
                            "vocabulary file saved at training time");
    predict_cmd->add_option("--text", ov.text,
                            "classify one inline text instead of files");

    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "holdout train/test evaluation");
    add_common(evaluate_cmd);
    add_inputs(evaluate_cmd);
    add_pipeline(evaluate_cmd, true);
    evaluate_cmd->add_option("--positive-class", ov.positive_class,
                             "class reported one-vs-rest");
    evaluate_cmd->add_option("--train-fraction", ov.train_fraction,
                             "fraction of records used for training");
    add_stratified(evaluate_cmd);

    CLI::App* crossval_cmd =
        app.add_subcommand("crossval", "k-fold cross-validation");
    add_common(crossval_cmd);
    add_inputs(crossval_cmd);
    add_pipeline(crossval_cmd, true);
    crossval_cmd->add_option("--positive-class", ov.positive_class,
                             "class reported one-vs-rest");
    crossval_cmd->add_option("--folds", ov.folds, "fold count");
    add_stratified(crossval_cmd);

    CLI::App* report_cmd = app.add_subcommand(
        "report", "trend, tag, correlation and rubric report");
    add_common(report_cmd);
    add_inputs(report_cmd);
    add_pipeline(report_cmd, false);
    report_cmd->add_option("--folds", ov.folds,
                           "fold count for rubric category scores");
    add_stratified(report_cmd);
    report_cmd->add_flag_callback(
        "--include-length", [&ov] { ov.include_length = true; },
        "add a comment-length column to the correlation matrix");
    report_cmd->add_option("--report-format", ov.report_formats,
                           "json, csv or text (repeatable)");

    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic corpus from a generator spec");
    add_common(synth_cmd);
    synth_cmd->add_option("--genspec", ov.genspec,
                          "generator spec file (json)");

    std::vector<const char*> argv_c;
    argv_c.reserve(argv.size() + 1);
    argv_c.push_back("revmine");
    for (const std::string& arg : argv) argv_c.push_back(arg.c_str());
    try {
      app.parse(static_cast<int>(argv_c.size()), argv_c.data());
    } catch (const CLI::Success& e) {
      app.exit(e);
      return kExitSuccess;
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitUsage;
    }

    RunConfig cfg =
        ov.config_path ? load_config(*ov.config_path) : RunConfig{};
    apply_overrides(cfg, ov);
    return dispatch(app.get_subcommands().front()->get_name(), cfg);
  } catch (const ConfigError& e) {
    std::cerr << "revmine: " << located(e, e.line()) << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "revmine: " << located(e, e.line(), e.field()) << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "revmine: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "revmine: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "revmine: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "revmine: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc) : 0);
  for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace revmine::cli
