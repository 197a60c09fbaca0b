#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "botsift/ip_address.hpp"
#include "botsift/log_record.hpp"
#include "botsift/time.hpp"

namespace botsift {

struct FaviconMatcher {
  /// Matched against the decoded path. GET and HEAD count, any status
  /// below 500.
  std::string path_prefix = "/favicon.ico";
  /// Query parameter carrying the rotation date ("v" for
  /// /favicon.ico?v=2024-09-01). When set, only a value equal to the
  /// request's UTC day marks the favicon as seen.
  std::optional<std::string> rotation_parameter;

  friend bool operator==(const FaviconMatcher&, const FaviconMatcher&) = default;
};

/// An authenticated action whose success stands in for a human user.
struct MarkerEndpoint {
  std::string path_prefix;
  std::string method = "POST";
  std::set<int> success_statuses = {200};

  friend bool operator==(const MarkerEndpoint&, const MarkerEndpoint&) = default;
};

struct FaviconConfig {
  FaviconMatcher favicon;
  std::optional<MarkerEndpoint> marker;

  friend bool operator==(const FaviconConfig&, const FaviconConfig&) = default;
};

struct LedgerKey {
  Day day;
  IpAddress ip;

  friend auto operator<=>(const LedgerKey&, const LedgerKey&) = default;
  friend bool operator==(const LedgerKey&, const LedgerKey&) = default;
};

struct LedgerEntry {
  std::uint64_t request_count = 0;
  bool favicon_seen = false;
  bool post_to_marker = false;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// Per (anonymized IP, UTC day) activity. Building is order independent and
/// two ledgers over disjoint record sets merge into the single-pass result.
class FaviconLedger {
 public:
  explicit FaviconLedger(FaviconConfig config = {});

  /// Throws PreconditionViolation for a raw (un-anonymized) record.
  void ingest(const LogRecord& record);
  /// Pointwise OR of flags and sum of counts. Both ledgers must use the
  /// same configuration (ConfigError otherwise).
  void merge(const FaviconLedger& other);

  const std::map<LedgerKey, LedgerEntry>& entries() const noexcept { return entries_; }
  const LedgerEntry* find(const IpAddress& ip, Day day) const;
  const FaviconConfig& config() const noexcept { return config_; }

  /// Favicon requests whose rotation value named another day (cached copies
  /// being revalidated). They do not mark the favicon as seen.
  std::uint64_t stale_favicon_requests() const noexcept { return stale_; }

  friend bool operator==(const FaviconLedger& a, const FaviconLedger& b) {
    return a.entries_ == b.entries_ && a.stale_ == b.stale_;
  }

 private:
  FaviconConfig config_;
  std::map<LedgerKey, LedgerEntry> entries_;
  std::uint64_t stale_ = 0;
};

enum class FaviconClass : std::uint8_t { likely_non_bot, unknown };

std::string_view to_string(FaviconClass c) noexcept;

FaviconClass likely_non_bot(const FaviconLedger& ledger, const IpAddress& ip, Day day);

enum class SeriesSelector : std::uint8_t { total_ips, favicon_ips, marker_post_ips };

/// Distinct IPs per day for the selected predicate, covering every day from
/// the ledger's first to last (zero-count days included).
std::vector<std::pair<Day, std::uint64_t>> daily_series(const FaviconLedger& ledger, SeriesSelector selector);

/// Rotation date carried by `query` under `parameter`: YYYY-MM-DD or
/// YYYYMMDD. nullopt when absent or unparsable.
std::optional<Day> rotation_value(std::string_view query, std::string_view parameter);

/// `day,ip,requests,favicon_seen,marker_post`, one row per entry in
/// (day, ip) order. Booleans are written as 0/1.
void write_ledger_csv(const FaviconLedger& ledger, std::ostream& out);

/// `day,total_ips,favicon_ips,marker_post_ips`.
void write_daily_series_csv(const FaviconLedger& ledger, std::ostream& out);

}  // namespace botsift
