#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace botsift {

/// Browser families the detection rules know about. Anything else is
/// reported as `other` with its product name kept in `browser_name`.
enum class BrowserFamily : std::uint8_t { chrome, chrome_mobile, firefox, safari, edge, opera, msie, other };

enum class OsFamily : std::uint8_t { windows, macos, android, ios, gnu_linux, chromeos, other };

std::string_view to_string(BrowserFamily f) noexcept;
std::string_view to_string(OsFamily f) noexcept;

/// Structured facts extracted from a user-agent string. `raw` is kept
/// verbatim so every verdict can be explained against the original text.
struct ParsedUserAgent {
  std::string raw;
  /// raw starts with the 11 characters "Mozilla/5.0".
  bool has_mozilla5_prefix = false;
  /// Contents of the first parenthesized comment, e.g.
  /// "Macintosh; Intel Mac OS X 10_15_7".
  std::optional<std::string> platform_token;

  std::optional<BrowserFamily> browser_family;
  /// Product name for BrowserFamily::other ("curl", "Googlebot", ...);
  /// canonical family name otherwise.
  std::optional<std::string> browser_name;
  std::optional<int> browser_major;
  std::optional<std::string> browser_full_version;

  std::optional<OsFamily> os_family;
  std::optional<std::string> os_name;
  /// As written in the string: "NT 6.1", "10_15_7", "4.4.2", "10".
  std::optional<std::string> os_version;

  std::optional<std::string> engine_token;

  friend bool operator==(const ParsedUserAgent&, const ParsedUserAgent&) = default;
};

/// Total: never throws, unrecognized input yields only `raw` and the
/// prefix flag.
ParsedUserAgent parse_user_agent(std::string_view ua);

/// Major Android version when the OS is Android.
std::optional<int> extract_android_version(const ParsedUserAgent& ua);

/// Leading integer of a dotted/underscored version ("4.4.2" -> 4,
/// "NT 6.1" -> 6). nullopt when no digits lead.
std::optional<int> leading_integer(std::string_view version);

/// Table-style labels: "Google Chrome 139", "Internet Explorer 8.0",
/// "(empty)" for an empty UA, the product name for other clients.
std::string browser_label(const ParsedUserAgent& ua);
/// "Windows 10", "Windows XP", "macOS", "Android", ... or "---".
std::string os_label(const ParsedUserAgent& ua);

/// Marketing name for a Windows NT token ("NT 6.1" -> "7"). nullopt when
/// unknown.
std::optional<std::string> windows_marketing_name(std::string_view nt_version);

}  // namespace botsift
