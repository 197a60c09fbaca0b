#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace botsift {

using Instant = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

/// "2024-10-10T11:55:36Z"
std::string format_iso8601(Instant t);
/// Inverse of format_iso8601. Also accepts fractional seconds (truncated)
/// and "+hh:mm" offsets.
std::optional<Instant> parse_iso8601(std::string_view text);

/// "2024-10-10"
std::string format_date(Day d);
std::optional<Day> parse_date(std::string_view text);

inline Day utc_day(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

/// Parses the bracketed Common Log Format time "10/Oct/2024:13:55:36 +0200"
/// into UTC. When `fixed_offset` is given the text must not carry a zone
/// (HAProxy style "06/Feb/2009:12:14:14.655") and the offset is applied
/// instead; fractional seconds are truncated.
std::optional<Instant> parse_clf_time(std::string_view text,
                                      std::optional<std::chrono::minutes> fixed_offset = std::nullopt);
/// Renders `t` in CLF layout with a "+0000" zone.
std::string format_clf_time(Instant t);

/// Parses "+hhmm" / "-hh:mm" style offsets.
std::optional<std::chrono::minutes> parse_utc_offset(std::string_view text);

}  // namespace botsift
