#include "botsift/time.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace botsift {

namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::optional<Instant> make_instant(int y, int mo, int d, int h, int mi, int s) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace

std::string format_iso8601(Instant t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return buf;
}

std::optional<Instant> parse_iso8601(std::string_view text) {
  int y, mo, d, h, mi, s;
  if (text.size() < 19 || !digits(text, 0, 4, y) || text[4] != '-' || !digits(text, 5, 2, mo) ||
      text[7] != '-' || !digits(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
      !digits(text, 11, 2, h) || text[13] != ':' || !digits(text, 14, 2, mi) || text[16] != ':' ||
      !digits(text, 17, 2, s)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  auto base = make_instant(y, mo, d, h, mi, s);
  if (!base) return std::nullopt;
  const std::string_view zone = text.substr(pos);
  if (zone == "Z" || zone == "z") return base;
  if (auto off = parse_utc_offset(zone)) return *base - *off;
  return std::nullopt;
}

std::string format_date(Day d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::optional<Day> parse_date(std::string_view text) {
  int y, mo, d;
  if (text.size() != 10 || !digits(text, 0, 4, y) || text[4] != '-' || !digits(text, 5, 2, mo) ||
      text[7] != '-' || !digits(text, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::optional<std::chrono::minutes> parse_utc_offset(std::string_view text) {
  if (text.empty() || (text[0] != '+' && text[0] != '-')) return std::nullopt;
  const int sign = text[0] == '-' ? -1 : 1;
  int h, m;
  if (text.size() == 5 && digits(text, 1, 2, h) && digits(text, 3, 2, m)) {
  } else if (text.size() == 6 && digits(text, 1, 2, h) && text[3] == ':' && digits(text, 4, 2, m)) {
  } else {
    return std::nullopt;
  }
  if (h > 23 || m > 59) return std::nullopt;
  return minutes{sign * (h * 60 + m)};
}

std::optional<Instant> parse_clf_time(std::string_view text,
                                      std::optional<std::chrono::minutes> fixed_offset) {
  // dd/Mon/yyyy:HH:MM:SS[.fff] [+zzzz]
  int d, y, h, mi, s;
  if (text.size() < 20 || !digits(text, 0, 2, d) || text[2] != '/' || text[6] != '/' ||
      !digits(text, 7, 4, y) || text[11] != ':' || !digits(text, 12, 2, h) || text[14] != ':' ||
      !digits(text, 15, 2, mi) || text[17] != ':' || !digits(text, 18, 2, s)) {
    return std::nullopt;
  }
  int mo = 0;
  const std::string_view mon = text.substr(3, 3);
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == mon) mo = static_cast<int>(i) + 1;
  }
  if (mo == 0) return std::nullopt;

  std::size_t pos = 20;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  auto base = make_instant(y, mo, d, h, mi, s);
  if (!base) return std::nullopt;

  std::chrono::minutes offset{0};
  if (fixed_offset) {
    if (pos != text.size()) return std::nullopt;
    offset = *fixed_offset;
  } else {
    if (pos >= text.size() || text[pos] != ' ') return std::nullopt;
    auto off = parse_utc_offset(text.substr(pos + 1));
    if (!off) return std::nullopt;
    offset = *off;
  }
  return *base - offset;
}

std::string format_clf_time(Instant t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d +0000", unsigned(ymd.day()),
                kMonths[unsigned(ymd.month()) - 1].data(), int(ymd.year()),
                int(hms.hours().count()), int(hms.minutes().count()),
                int(hms.seconds().count()));
  return buf;
}

}  // namespace botsift
