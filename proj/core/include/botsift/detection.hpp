#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "botsift/refdata.hpp"
#include "botsift/time.hpp"
#include "botsift/ua_model.hpp"

namespace botsift {

/// Rules that can flag a user agent. The declaration order is the order
/// used when reasons are rendered.
enum class Reason : std::uint8_t {
  regex_bot,
  list_bot,
  non_mozilla_prefix,
  deprecated_browser,
  deprecated_os,
  ua_reduction_violation,
};

inline constexpr std::array<Reason, 6> kAllReasons = {Reason::regex_bot,          Reason::list_bot,
                                                      Reason::non_mozilla_prefix, Reason::deprecated_browser,
                                                      Reason::deprecated_os,      Reason::ua_reduction_violation};

/// "regex-bot", "list-bot", "non-mozilla-prefix", ...
std::string_view to_string(Reason r) noexcept;
std::optional<Reason> parse_reason(std::string_view name) noexcept;

class ReasonSet {
 public:
  constexpr ReasonSet() = default;
  constexpr ReasonSet(std::initializer_list<Reason> reasons) {
    for (Reason r : reasons) insert(r);
  }

  constexpr void insert(Reason r) noexcept { bits_ |= bit(r); }
  constexpr void insert(ReasonSet other) noexcept { bits_ |= other.bits_; }
  constexpr void erase(Reason r) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(r)); }
  constexpr bool contains(Reason r) const noexcept { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  constexpr std::uint8_t bits() const noexcept { return bits_; }

  /// Members in enum order.
  std::vector<Reason> members() const;
  /// Members joined with '|', empty string for the empty set.
  std::string to_string() const;
  /// Inverse of to_string. Throws FormatError on an unknown name.
  static ReasonSet parse(std::string_view text);

  friend constexpr bool operator==(ReasonSet, ReasonSet) = default;

 private:
  static constexpr std::uint8_t bit(Reason r) noexcept {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(r));
  }
  std::uint8_t bits_ = 0;
};

/// strict runs the base cascade only (no reduction check);
/// full adds the UA-reduction rule.
enum class DetectionMode : std::uint8_t { strict, full };

std::string_view to_string(DetectionMode m) noexcept;
std::optional<DetectionMode> parse_detection_mode(std::string_view name) noexcept;

struct DetectionConfig {
  /// How long a version may be superseded (or out of support) before it
  /// counts as deprecated.
  std::chrono::days deprecation_window{730};
  /// Classification is relative to this date. Must be set explicitly.
  std::optional<Day> reference_date;
  bool enable_reduction_check = true;
  /// Support period assumed for an OS version without a known end of life
  /// once a newer version exists.
  std::chrono::days os_support_window{1461};

  BotList bot_list;
  ReleaseDatabase release_db;
  FrozenPlatformTokens frozen_tokens;
  BotRegexSet regex_set;

  /// Bundled reference data, default windows, reduction check on for
  /// DetectionMode::full only.
  static DetectionConfig defaults(Day reference_date, DetectionMode mode = DetectionMode::full);

  /// Throws ConfigError when the reference date is missing or a window is
  /// not positive.
  void validate() const;
};

struct Verdict {
  std::string ua;
  bool is_bot = false;
  ReasonSet reasons;
  std::optional<std::string> matched_bot_name;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// True when `ua` starts with "Mozilla/5.0" followed by the end of the
/// string or a character that is not a letter or digit.
bool has_mozilla5_token(std::string_view ua) noexcept;

bool is_bot_by_regex(std::string_view ua, const DetectionConfig& config);
std::optional<std::string> is_bot_by_list(std::string_view ua, const DetectionConfig& config);
/// Subset of {deprecated-browser, deprecated-os}.
ReasonSet has_deprecated_version(const ParsedUserAgent& ua, const DetectionConfig& config);
bool violates_ua_reduction(const ParsedUserAgent& ua, const DetectionConfig& config);

/// Evaluates every rule. Requires a validated config.
Verdict classify(std::string_view ua, const DetectionConfig& config);

/// classify() with a memo keyed by the raw UA. Not synchronized; use one
/// instance per thread. Holds its own copy of the config.
class CachedClassifier {
 public:
  explicit CachedClassifier(const DetectionConfig& config);

  const Verdict& classify(std::string_view ua);
  std::size_t cache_size() const noexcept { return memo_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  DetectionConfig config_;
  std::unordered_map<std::string, Verdict, Hash, std::equal_to<>> memo_;
};

/// Verdict CSV: `user_agent,is_bot,reasons,matched_bot_name`. is_bot is
/// "true"/"false"; reasons are '|'-joined in enum order.
inline constexpr std::string_view kVerdictHeader = "user_agent,is_bot,reasons,matched_bot_name";

void write_verdicts(std::span<const Verdict> verdicts, std::ostream& out);
/// Throws SchemaMismatch for a wrong header, FormatError for bad rows.
std::vector<Verdict> read_verdicts(std::istream& in);

}  // namespace botsift
