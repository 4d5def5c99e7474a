#include "revmine/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "revmine/error.hpp"

namespace revmine::csv {

bool Reader::next(std::vector<std::string>& fields, std::size_t* line) {
  fields.clear();
  if (in_.peek() == std::istream::traits_type::eof()) return false;
  const std::size_t record_line = line_ + 1;
  if (line) *line = record_line;

  enum class State { StartOfField, Unquoted, Quoted, AfterQuote };
  State state = State::StartOfField;
  std::string field;

  for (;;) {
    const int ci = in_.get();
    if (ci == std::istream::traits_type::eof()) {
      if (state == State::Quoted) {
        throw ParseError("unterminated quoted field", record_line);
      }
      ++line_;
      fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ci);
    const bool row_end =
        state != State::Quoted &&
        (c == '\n' ||
         (c == '\r' && in_.peek() == '\n' && (in_.get(), true)));
    if (row_end) {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    }
    switch (state) {
      case State::StartOfField:
        if (c == '"') {
          state = State::Quoted;
        } else if (c == ',') {
          fields.emplace_back();
        } else {
          field.push_back(c);
          state = State::Unquoted;
        }
        break;
      case State::Unquoted:
        if (c == ',') {
          fields.push_back(std::move(field));
          field.clear();
          state = State::StartOfField;
        } else {
          field.push_back(c);
        }
        break;
      case State::Quoted:
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            state = State::AfterQuote;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        break;
      case State::AfterQuote:
        if (c == ',') {
          fields.push_back(std::move(field));
          field.clear();
          state = State::StartOfField;
        } else {
          throw ParseError("unexpected character after closing quote",
                           line_ + 1);
        }
        break;
    }
  }
}

std::string escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace revmine::csv
