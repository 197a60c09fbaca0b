#include "botsift/favicon.hpp"

#include "botsift/csv.hpp"
#include "botsift/error.hpp"
#include "botsift/log_ingest.hpp"

namespace botsift {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

std::optional<Day> rotation_value(std::string_view query, std::string_view parameter) {
  std::size_t start = 0;
  while (start <= query.size()) {
    std::size_t end = query.find('&', start);
    if (end == std::string_view::npos) end = query.size();
    const std::string_view pair = query.substr(start, end - start);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == parameter) {
      const std::string value = percent_decode(pair.substr(eq + 1));
      if (value.size() == 8 && value.find_first_not_of("0123456789") == std::string::npos) {
        return parse_date(value.substr(0, 4) + "-" + value.substr(4, 2) + "-" + value.substr(6, 2));
      }
      return parse_date(value);
    }
    start = end + 1;
  }
  return std::nullopt;
}

FaviconLedger::FaviconLedger(FaviconConfig config) : config_(std::move(config)) {}

void FaviconLedger::ingest(const LogRecord& record) {
  if (record.provenance != Provenance::anonymized) {
    throw PreconditionViolation("favicon ledger only accepts anonymized records");
  }
  const Day day = utc_day(record.timestamp);
  LedgerEntry& entry = entries_[LedgerKey{day, record.client_ip}];
  ++entry.request_count;

  const bool favicon_request = (record.method == "GET" || record.method == "HEAD") && record.status < 500 &&
                               starts_with(record.path, config_.favicon.path_prefix);
  if (favicon_request) {
    if (!config_.favicon.rotation_parameter) {
      entry.favicon_seen = true;
    } else if (rotation_value(record.query, *config_.favicon.rotation_parameter) == day) {
      entry.favicon_seen = true;
    } else {
      ++stale_;
    }
  }

  if (config_.marker && record.method == config_.marker->method &&
      starts_with(record.path, config_.marker->path_prefix) &&
      config_.marker->success_statuses.contains(record.status)) {
    entry.post_to_marker = true;
  }
}

void FaviconLedger::merge(const FaviconLedger& other) {
  if (!(config_ == other.config_)) throw ConfigError("cannot merge favicon ledgers built with different settings");
  for (const auto& [key, e] : other.entries_) {
    LedgerEntry& mine = entries_[key];
    mine.request_count += e.request_count;
    mine.favicon_seen = mine.favicon_seen || e.favicon_seen;
    mine.post_to_marker = mine.post_to_marker || e.post_to_marker;
  }
  stale_ += other.stale_;
}

const LedgerEntry* FaviconLedger::find(const IpAddress& ip, Day day) const {
  const auto it = entries_.find(LedgerKey{day, ip});
  return it == entries_.end() ? nullptr : &it->second;
}

std::string_view to_string(FaviconClass c) noexcept {
  return c == FaviconClass::likely_non_bot ? "likely-non-bot" : "unknown";
}

FaviconClass likely_non_bot(const FaviconLedger& ledger, const IpAddress& ip, Day day) {
  const LedgerEntry* e = ledger.find(ip, day);
  return e != nullptr && e->favicon_seen ? FaviconClass::likely_non_bot : FaviconClass::unknown;
}

std::vector<std::pair<Day, std::uint64_t>> daily_series(const FaviconLedger& ledger, SeriesSelector selector) {
  std::vector<std::pair<Day, std::uint64_t>> out;
  if (ledger.entries().empty()) return out;
  const Day first = ledger.entries().begin()->first.day;
  const Day last = ledger.entries().rbegin()->first.day;
  for (Day d = first; d <= last; d += std::chrono::days{1}) out.emplace_back(d, 0);
  // Keys are unique per (day, ip), so counting keys counts distinct IPs.
  for (const auto& [key, e] : ledger.entries()) {
    bool selected = true;
    if (selector == SeriesSelector::favicon_ips) selected = e.favicon_seen;
    if (selector == SeriesSelector::marker_post_ips) selected = e.post_to_marker;
    if (selected) ++out[static_cast<std::size_t>((key.day - first).count())].second;
  }
  return out;
}

void write_ledger_csv(const FaviconLedger& ledger, std::ostream& out) {
  out << "day,ip,requests,favicon_seen,marker_post\n";
  for (const auto& [key, e] : ledger.entries()) {
    const std::string day = format_date(key.day);
    const std::string ip = key.ip.to_string();
    const std::string requests = std::to_string(e.request_count);
    csv::write_row(out, {day, ip, requests, e.favicon_seen ? "1" : "0", e.post_to_marker ? "1" : "0"});
  }
}

void write_daily_series_csv(const FaviconLedger& ledger, std::ostream& out) {
  const auto total = daily_series(ledger, SeriesSelector::total_ips);
  const auto favicon = daily_series(ledger, SeriesSelector::favicon_ips);
  const auto marker = daily_series(ledger, SeriesSelector::marker_post_ips);
  out << "day,total_ips,favicon_ips,marker_post_ips\n";
  for (std::size_t i = 0; i < total.size(); ++i) {
    out << format_date(total[i].first) << ',' << total[i].second << ',' << favicon[i].second << ','
        << marker[i].second << '\n';
  }
}

}  // namespace botsift
