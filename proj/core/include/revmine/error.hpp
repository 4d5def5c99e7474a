#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revmine {

// Base for all library errors that are not plain precondition violations
// (those throw std::invalid_argument).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data. `line` is 1-based; 0 means "not line oriented".
// `field` names the offending column/key when known.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line = 0, std::string field = {})
      : Error(std::move(message)), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Config file problems (bad syntax, unknown or missing keys).
class ConfigError : public Error {
 public:
  ConfigError(std::string message, std::size_t line = 0)
      : Error(std::move(message)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Semantically invalid data discovered past the parsing stage
// (e.g. a task with no usable records, a model/vocabulary mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace revmine
