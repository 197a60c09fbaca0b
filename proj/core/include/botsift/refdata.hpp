#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "botsift/ip_address.hpp"
#include "botsift/log_record.hpp"
#include "botsift/time.hpp"

namespace botsift {

// ---------------------------------------------------------------- bot list

struct BotListEntry {
  std::string match_token;
  std::string bot_name;
  std::optional<std::string> operator_name;

  friend bool operator==(const BotListEntry&, const BotListEntry&) = default;
};

enum class BotListFormat : std::uint8_t { robots_json, plain_names };

/// Self-declared bot names. Matching is a case-insensitive substring search
/// over the raw UA; when several tokens match, the longest wins and ties go
/// to the lexicographically smaller token.
class BotList {
 public:
  BotList() = default;
  /// Deduplicates by match token, ignoring case. The surviving entry is the
  /// one whose token sorts first, so the result does not depend on input
  /// order. Empty tokens are rejected with FormatError.
  explicit BotList(std::vector<BotListEntry> entries);

  const std::vector<BotListEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Matching entry for `ua`, or nullptr.
  const BotListEntry* match(std::string_view ua) const;

 private:
  std::vector<BotListEntry> entries_;  // sorted by lowered token
  std::vector<std::string> lowered_;
};

/// robots-json: object of name -> metadata (only "operator" is kept).
/// plain-names: one token per line, '#' starts a comment. Throws
/// FormatError with the offending entry index.
BotList load_bot_list(std::istream& source, BotListFormat format);

/// Snapshot of the crowdsourced AI-crawler list shipped with the library.
const BotList& bundled_bot_list();

// --------------------------------------------------------------- bot regex

/// Case-insensitive pattern set. The default is the single pattern
/// `bot|crawler|spider|crawling`.
class BotRegexSet {
 public:
  BotRegexSet();
  /// Throws ConfigError for an invalid pattern.
  explicit BotRegexSet(std::vector<std::string> patterns);

  bool matches(std::string_view ua) const;
  const std::vector<std::string>& patterns() const noexcept { return patterns_; }

 private:
  std::vector<std::string> patterns_;
  std::vector<std::regex> compiled_;
};

// ---------------------------------------------------------- release dates

enum class ReleaseKind : std::uint8_t { browser, os, reduction };

std::string_view to_string(ReleaseKind k) noexcept;

/// One row of the release table. Browser versions are majors ("39"), OS
/// versions are dotted ("6.1", "10.15", "4.4"). A `reduction` row records
/// the first major of a browser family that sends frozen platform tokens.
struct ReleaseEntry {
  ReleaseKind kind = ReleaseKind::browser;
  std::string family;
  std::string version;
  Day release_date;
  std::optional<Day> eol_date;

  friend bool operator==(const ReleaseEntry&, const ReleaseEntry&) = default;
};

/// Dotted/underscored version as integer components. "NT " prefixes are
/// dropped; nullopt when a component is not a number.
std::optional<std::vector<int>> version_components(std::string_view version);

class ReleaseDatabase {
 public:
  ReleaseDatabase() = default;
  /// Throws ValidationError naming the family when release dates do not
  /// strictly increase with version, and FormatError for unusable versions
  /// or duplicate rows.
  explicit ReleaseDatabase(std::vector<ReleaseEntry> entries);

  /// Sorted by kind, family, then version.
  const std::vector<ReleaseEntry>& entries() const noexcept { return entries_; }

  const ReleaseEntry* browser(std::string_view family, int major) const;
  /// The date a browser major stops being current: release of the next
  /// higher major on record, else its EOL date, else nullopt.
  std::optional<Day> browser_superseded(std::string_view family, int major) const;

  /// Greatest recorded version <= `version` (component-wise).
  const ReleaseEntry* os(std::string_view family, std::string_view version) const;
  /// EOL of the matched OS entry when known. Otherwise the latest version of
  /// the family never expires and older ones expire `support_window` after
  /// their release.
  std::optional<Day> os_end_of_support(std::string_view family, std::string_view version,
                                       std::chrono::days support_window) const;

  /// First major that sends frozen platform tokens, when the family reduces.
  std::optional<int> reduction_major(std::string_view family) const;

 private:
  std::vector<ReleaseEntry> entries_;
};

/// CSV `kind,family,version,release_date,eol_date`; dates are YYYY-MM-DD,
/// eol_date may be empty.
ReleaseDatabase load_release_db(std::istream& source);
const ReleaseDatabase& bundled_release_db();

// ---------------------------------------------------------- frozen tokens

class FrozenPlatformTokens {
 public:
  /// The five values sent by reduced user agents.
  FrozenPlatformTokens();
  explicit FrozenPlatformTokens(std::set<std::string> tokens) : tokens_(std::move(tokens)) {}

  const std::set<std::string>& tokens() const noexcept { return tokens_; }

  /// Android browsers prepend "Linux; " to the frozen "Android 10; K", so a
  /// platform token also matches once that prefix is removed.
  bool contains(std::string_view platform_token) const;

 private:
  std::set<std::string> tokens_;
};

// --------------------------------------------------------- known-bot IPs

struct Cidr {
  IpAddress network;
  int prefix_length = 0;

  /// "10.0.0.0/8", "2001:db8::/32", or a bare address (full length).
  static std::optional<Cidr> parse(std::string_view text);
  bool contains(const IpAddress& ip) const noexcept;
};

/// CIDR blocks held as merged, sorted address intervals. Lookups need raw
/// addresses: membership of an anonymized address means nothing.
class KnownBotIPs {
 public:
  KnownBotIPs() = default;
  explicit KnownBotIPs(const std::vector<Cidr>& blocks);

  bool contains(const IpAddress& raw_ip) const;
  bool empty() const noexcept { return intervals_.empty(); }
  std::size_t interval_count() const noexcept { return intervals_.size(); }

 private:
  struct Interval {
    IpAddress first;
    IpAddress last;
  };
  std::vector<Interval> intervals_;
};

/// One CIDR per line; blank lines and '#' comments are skipped. Throws
/// FormatError with the 0-based entry index of a bad block.
KnownBotIPs load_known_bot_ips(std::istream& source);

bool is_known_bot_ip(const IpAddress& raw_ip, const KnownBotIPs& db);
/// Throws PreconditionViolation when the record is already anonymized.
bool is_known_bot_ip(const LogRecord& record, const KnownBotIPs& db);

}  // namespace botsift
