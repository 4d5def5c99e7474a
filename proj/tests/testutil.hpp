#pragma once

// Shared test scaffolding: scratch directories, file helpers and a small
// corpus builder used across the suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "revmine/corpus.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen(std::random_device{}());
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / ("revmine-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One review with a single comment; the fields most tests care about.
inline revmine::Review make_review(std::string id, std::string reviewer,
                                   std::string reviewee, int year,
                                   std::string text) {
  revmine::Review r;
  r.reviewer = std::move(reviewer);
  r.reviewee = std::move(reviewee);
  r.year = year;
  revmine::Comment c;
  c.id = id + "-c1";
  c.review_id = id;
  c.text = std::move(text);
  r.comments.push_back(std::move(c));
  r.id = std::move(id);
  return r;
}

inline revmine::Corpus make_corpus(std::vector<revmine::Review> reviews,
                                   std::pair<int, int> span) {
  revmine::Corpus c;
  c.reviews = std::move(reviews);
  c.year_span = span;
  return c;
}

}  // namespace testutil
