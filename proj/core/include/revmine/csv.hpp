#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC 4180 CSV reader/writer. Quoted fields may contain commas,
// doubled quotes and newlines; both \n and \r\n row endings are accepted.

namespace revmine::csv {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads one record. Returns false on clean end of input. The record's
  // starting line number (1-based) is written to `line` when given. Throws
  // ParseError on a quoting error.
  bool next(std::vector<std::string>& fields, std::size_t* line = nullptr);

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;  // lines consumed so far
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double value);

}  // namespace revmine::csv
