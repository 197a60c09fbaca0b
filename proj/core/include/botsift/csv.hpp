#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace botsift::csv {

/// One parsed field. `quoted` distinguishes `""` from an empty bare field,
/// which the normalized schema uses to tell an empty referer from none.
struct Field {
  std::string value;
  bool quoted = false;
};

using Row = std::vector<Field>;

/// RFC 4180 field quoting: quotes when the value holds a comma, quote, CR
/// or LF, or when `force_quotes` is set (used for present-but-empty values).
void write_field(std::ostream& out, std::string_view value, bool force_quotes = false);

/// Writes `fields` comma-joined and terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string_view>& fields);

/// Streaming RFC 4180 reader. Quoted fields may span lines; CRLF and LF
/// terminators are both accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next row, or nullopt at end of input. Throws FormatError on an
  /// unterminated quoted field or garbage after a closing quote.
  std::optional<Row> next();

  /// Physical line on which the last returned row started (1-based).
  std::size_t line() const noexcept { return row_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
};

/// Header names of a parsed row.
std::vector<std::string> names(const Row& row);

}  // namespace botsift::csv
