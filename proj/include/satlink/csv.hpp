#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace satlink::csv {

// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  // 1-based line number on which the last returned record started.
  std::size_t line() const { return record_line_; }

  // Set when the last record had an unterminated quoted field.
  bool malformed() const { return malformed_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool malformed_ = false;
};

// Quotes a field only when it needs it.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Fixed six-digit decimal used by every on-disk numeric column.
std::string format_fixed6(double v);

}  // namespace satlink::csv
