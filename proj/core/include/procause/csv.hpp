#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace procause::csv {

// RFC 4180 record reader: comma separated, double-quote quoting, quoted
// fields may contain commas, doubled quotes and line breaks. Accepts LF and
// CRLF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input. Throws ParseError on an unterminated quote.
  bool next(std::vector<std::string>& fields);

  // 1-based number of the record last returned by next().
  std::size_t record_number() const noexcept { return record_; }

 private:
  std::istream& in_;
  std::size_t record_ = 0;
};

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace procause::csv
