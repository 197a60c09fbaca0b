#include "botsift/detection.hpp"

#include <bit>

#include "botsift/csv.hpp"
#include "botsift/error.hpp"

namespace botsift {

std::string_view to_string(Reason r) noexcept {
  switch (r) {
    case Reason::regex_bot: return "regex-bot";
    case Reason::list_bot: return "list-bot";
    case Reason::non_mozilla_prefix: return "non-mozilla-prefix";
    case Reason::deprecated_browser: return "deprecated-browser";
    case Reason::deprecated_os: return "deprecated-os";
    case Reason::ua_reduction_violation: return "ua-reduction-violation";
  }
  return "regex-bot";
}

std::optional<Reason> parse_reason(std::string_view name) noexcept {
  for (Reason r : kAllReasons) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::size_t ReasonSet::size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Reason> ReasonSet::members() const {
  std::vector<Reason> out;
  for (Reason r : kAllReasons) {
    if (contains(r)) out.push_back(r);
  }
  return out;
}

std::string ReasonSet::to_string() const {
  std::string out;
  for (Reason r : members()) {
    if (!out.empty()) out += '|';
    out += botsift::to_string(r);
  }
  return out;
}

ReasonSet ReasonSet::parse(std::string_view text) {
  ReasonSet out;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const std::string_view name = text.substr(0, bar);
    const auto r = parse_reason(name);
    if (!r) throw FormatError("unknown reason '" + std::string(name) + "'");
    out.insert(*r);
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return out;
}

std::string_view to_string(DetectionMode m) noexcept { return m == DetectionMode::strict ? "strict" : "full"; }

std::optional<DetectionMode> parse_detection_mode(std::string_view name) noexcept {
  if (name == "strict") return DetectionMode::strict;
  if (name == "full") return DetectionMode::full;
  return std::nullopt;
}

DetectionConfig DetectionConfig::defaults(Day reference_date, DetectionMode mode) {
  DetectionConfig c;
  c.reference_date = reference_date;
  c.enable_reduction_check = mode == DetectionMode::full;
  c.bot_list = bundled_bot_list();
  c.release_db = bundled_release_db();
  return c;
}

void DetectionConfig::validate() const {
  if (!reference_date) throw ConfigError("detection needs an explicit reference date");
  if (deprecation_window.count() <= 0) throw ConfigError("deprecation window must be positive");
  if (os_support_window.count() <= 0) throw ConfigError("OS support window must be positive");
}

bool has_mozilla5_token(std::string_view ua) noexcept {
  constexpr std::string_view kToken = "Mozilla/5.0";
  if (ua.substr(0, kToken.size()) != kToken) return false;
  if (ua.size() == kToken.size()) return true;
  const char next = ua[kToken.size()];
  const bool alnum = (next >= '0' && next <= '9') || (next >= 'a' && next <= 'z') || (next >= 'A' && next <= 'Z');
  return !alnum;
}

bool is_bot_by_regex(std::string_view ua, const DetectionConfig& config) { return config.regex_set.matches(ua); }

std::optional<std::string> is_bot_by_list(std::string_view ua, const DetectionConfig& config) {
  if (const BotListEntry* e = config.bot_list.match(ua)) return e->bot_name;
  return std::nullopt;
}

namespace {

std::optional<std::string_view> release_family(BrowserFamily f) {
  switch (f) {
    case BrowserFamily::chrome:
    case BrowserFamily::chrome_mobile: return "Chrome";
    case BrowserFamily::firefox: return "Firefox";
    case BrowserFamily::safari: return "Safari";
    case BrowserFamily::edge: return "Edge";
    case BrowserFamily::opera: return "Opera";
    case BrowserFamily::msie: return "MSIE";
    case BrowserFamily::other: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string_view> release_family(OsFamily f, std::string_view version) {
  switch (f) {
    case OsFamily::windows: return version.substr(0, 3) == "NT " ? "Windows" : "Windows-9x";
    case OsFamily::macos: return "macOS";
    case OsFamily::android: return "Android";
    case OsFamily::ios: return "iOS";
    default: return std::nullopt;
  }
}

Day cutoff(const DetectionConfig& config) { return *config.reference_date - config.deprecation_window; }

// Browsers that freeze the platform report a fixed OS version, sometimes in
// their own spelling (Firefox writes "Intel Mac OS X 10.15"). A claimed OS
// version that resolves to the same release row as a frozen token's version
// carries no information either.
bool frozen_os_version(std::string_view family, std::string_view version, const DetectionConfig& config) {
  const ReleaseEntry* claimed = config.release_db.os(family, version);
  if (claimed == nullptr) return false;
  for (const auto& token : config.frozen_tokens.tokens()) {
    const ParsedUserAgent frozen = parse_user_agent("Mozilla/5.0 (" + token + ")");
    if (!frozen.os_family || !frozen.os_version) continue;
    const auto frozen_family = release_family(*frozen.os_family, *frozen.os_version);
    if (frozen_family == family && config.release_db.os(family, *frozen.os_version) == claimed) return true;
  }
  return false;
}

}  // namespace

ReasonSet has_deprecated_version(const ParsedUserAgent& ua, const DetectionConfig& config) {
  ReasonSet out;
  const Day limit = cutoff(config);

  if (ua.browser_family && ua.browser_major) {
    if (auto family = release_family(*ua.browser_family)) {
      const auto superseded = config.release_db.browser_superseded(*family, *ua.browser_major);
      if (superseded && *superseded < limit) out.insert(Reason::deprecated_browser);
    }
  }

  // A frozen platform token says nothing about the real OS version.
  const bool frozen = ua.platform_token && config.frozen_tokens.contains(*ua.platform_token);
  if (!frozen && ua.os_family && ua.os_version) {
    const auto family = release_family(*ua.os_family, *ua.os_version);
    if (family && !frozen_os_version(*family, *ua.os_version, config)) {
      const auto end = config.release_db.os_end_of_support(*family, *ua.os_version, config.os_support_window);
      if (end && *end < limit) out.insert(Reason::deprecated_os);
    }
  }
  return out;
}

bool violates_ua_reduction(const ParsedUserAgent& ua, const DetectionConfig& config) {
  if (!config.enable_reduction_check || !ua.browser_family || !ua.browser_major) return false;
  // Chromium browsers on iOS are WebKit shells and keep the full platform.
  if (ua.os_family == OsFamily::ios) return false;
  std::string_view family;
  switch (*ua.browser_family) {
    case BrowserFamily::chrome:
    case BrowserFamily::chrome_mobile: family = "Chrome"; break;
    case BrowserFamily::edge: family = "Edge"; break;
    default: return false;
  }
  const auto first_reduced = config.release_db.reduction_major(family);
  if (!first_reduced || *ua.browser_major < *first_reduced) return false;
  return !ua.platform_token || !config.frozen_tokens.contains(*ua.platform_token);
}

Verdict classify(std::string_view ua, const DetectionConfig& config) {
  Verdict v;
  v.ua = std::string(ua);
  if (is_bot_by_regex(ua, config)) v.reasons.insert(Reason::regex_bot);
  if (auto name = is_bot_by_list(ua, config)) {
    v.reasons.insert(Reason::list_bot);
    v.matched_bot_name = std::move(name);
  }
  if (!has_mozilla5_token(ua)) v.reasons.insert(Reason::non_mozilla_prefix);
  const ParsedUserAgent parsed = parse_user_agent(ua);
  v.reasons.insert(has_deprecated_version(parsed, config));
  if (violates_ua_reduction(parsed, config)) v.reasons.insert(Reason::ua_reduction_violation);
  v.is_bot = !v.reasons.empty();
  return v;
}

CachedClassifier::CachedClassifier(const DetectionConfig& config) : config_(config) { config_.validate(); }

const Verdict& CachedClassifier::classify(std::string_view ua) {
  if (auto it = memo_.find(ua); it != memo_.end()) return it->second;
  auto [it, inserted] = memo_.emplace(std::string(ua), botsift::classify(ua, config_));
  return it->second;
}

void write_verdicts(std::span<const Verdict> verdicts, std::ostream& out) {
  out << kVerdictHeader << '\n';
  for (const auto& v : verdicts) {
    const std::string reasons = v.reasons.to_string();
    csv::write_row(out, {v.ua, v.is_bot ? "true" : "false", reasons, v.matched_bot_name.value_or("")});
  }
}

std::vector<Verdict> read_verdicts(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header || csv::names(*header) != std::vector<std::string>{"user_agent", "is_bot", "reasons",
                                                                 "matched_bot_name"}) {
    throw SchemaMismatch("verdict header must be " + std::string(kVerdictHeader));
  }
  std::vector<Verdict> out;
  while (auto row = reader.next()) {
    const std::size_t index = out.size();
    if (row->size() != 4) throw FormatError("verdict row needs 4 fields", index);
    Verdict v;
    v.ua = (*row)[0].value;
    const std::string& flag = (*row)[1].value;
    if (flag != "true" && flag != "false") throw FormatError("is_bot must be true or false", index);
    v.is_bot = flag == "true";
    v.reasons = ReasonSet::parse((*row)[2].value);
    if (!(*row)[3].value.empty()) v.matched_bot_name = (*row)[3].value;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace botsift
