#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "botsift/csv.hpp"
#include "botsift/log_record.hpp"

namespace botsift {

enum class LogFormat : std::uint8_t { caddy_json, apache_combined, nginx_combined, haproxy_http };

std::string_view to_string(LogFormat f) noexcept;
std::optional<LogFormat> parse_log_format(std::string_view name) noexcept;

/// One physical line of an access log, without its terminator.
struct RawLine {
  LogFormat format = LogFormat::apache_combined;
  std::uint64_t line_number = 1;
  std::string_view text;
};

struct ParseError {
  enum class Kind : std::uint8_t { malformed_line, missing_ua_capture, schema_mismatch };

  Kind kind = Kind::malformed_line;
  std::uint64_t line_number = 0;
  std::string detail;
};

std::string_view to_string(ParseError::Kind k) noexcept;

using ParseResult = std::variant<LogRecord, ParseError>;

/// HAProxy does not log the User-Agent unless told to capture it; the
/// operator names the 0-based slot of the captured request headers
/// ("{...|...}") that holds it.
struct HaproxyCaptureLayout {
  std::optional<std::size_t> user_agent_slot;
  std::optional<std::size_t> referer_slot;
  /// HAProxy writes accept dates in local time without a zone.
  std::chrono::minutes utc_offset{0};
};

/// Parses log lines of one format. Construction validates the format's
/// configuration; parsing itself is pure and thread-safe.
class LineParser {
 public:
  /// Throws ConfigError for haproxy-http without a User-Agent slot.
  explicit LineParser(LogFormat format, HaproxyCaptureLayout haproxy = {});

  LogFormat format() const noexcept { return format_; }

  /// Never throws. `raw.format` must match the parser's format.
  ParseResult parse(const RawLine& raw) const;

 private:
  LogFormat format_;
  HaproxyCaptureLayout haproxy_;
};

/// Convenience wrapper over LineParser with default HAProxy layout
/// (User-Agent in slot 0).
ParseResult parse_line(const RawLine& raw);

/// Re-serializes a record in `format`'s field order. Parsing the result
/// with the same format yields the record again.
std::string format_line(const LogRecord& record, LogFormat format,
                        const HaproxyCaptureLayout& haproxy = {0, std::nullopt, {}});

/// Percent-decoding for URL paths; invalid escapes are kept verbatim and
/// '+' is left alone.
std::string percent_decode(std::string_view s);
/// Escapes '%', '?', '#', whitespace, quotes, backslash, control and
/// non-ASCII bytes so percent_decode(percent_encode_path(p)) == p.
std::string percent_encode_path(std::string_view s);

/// Header of the normalized CSV schema.
inline constexpr std::string_view kNormalizedHeader =
    "timestamp,ip,method,path,query,status,user_agent,referer";

/// The eight normalized fields of `record`, comma-joined, no terminator.
/// Throws PreconditionViolation for a raw record.
void write_normalized_fields(std::ostream& out, const LogRecord& record);

/// Streaming writer for the normalized CSV schema. Refuses records that
/// are not anonymized.
class NormalizedWriter {
 public:
  explicit NormalizedWriter(std::ostream& out);

  void write(const LogRecord& record);
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::ostream& out_;
  std::size_t rows_ = 0;
};

/// Streaming reader for the normalized CSV schema. Throws SchemaMismatch
/// for an unknown header and FormatError for a bad row. Records come back
/// flagged anonymized.
class NormalizedReader {
 public:
  explicit NormalizedReader(std::istream& in);

  std::optional<LogRecord> next();

 private:
  csv::Reader reader_;
  std::size_t row_index_ = 0;
};

/// Builds a record from the eight normalized fields (values are moved
/// out). Throws FormatError naming `row_index`.
LogRecord normalized_record_from_fields(std::span<csv::Field> fields, std::size_t row_index);

/// Writes header + rows and returns the row count. Throws
/// PreconditionViolation before writing anything if a record is raw.
std::size_t write_normalized(std::span<const LogRecord> records, std::ostream& sink);
std::vector<LogRecord> read_normalized(std::istream& source);

/// Calls `on_line` for every line of `in` (terminators stripped, CR too).
/// Line numbers start at 1.
void for_each_line(std::istream& in,
                   const std::function<void(std::uint64_t line_number, std::string_view text)>& on_line);

}  // namespace botsift
